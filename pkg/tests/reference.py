"""Published figures the fixtures and analytics are checked against."""

from fractions import Fraction

PAIRED_A = [Fraction(s) for s in ("-7.1", "-10.0", "-11.2", "-32.0", "-33.4", "-53.7")]
PAIRED_B = [Fraction(s) for s in (
    "-34.23", "-0.62", "-0.50", "-0.26", "-0.20", "-0.10", "-0.06", "-0.02",
    "-0.02", "-0.02", "1.20", "1.26", "2.50", "14.19", "143.80", "552.17",
)]
IQR_B = (Fraction("-0.20"), Fraction("2.50"))

HITS_A = {"sports": (5, 5), "politics": (22, 29), "macro_crypto": (6, 10), "other": (5, 6), "all": (38, 50)}
HITS_B_ALL = (56, 109)
HITS_B_SPORTS = (39, 66)

WINNERS_A = {"twitter": "16%", "news": "53%", "bluesky": "11%", "facebook_public": "13%",
             "youtube": "5%", "instagram_public": "0%", "forum": "3%"}
WINNERS_B = {"twitter": "38%", "news": "27%", "bluesky": "16%", "facebook_public": "7%",
             "youtube": "5%", "instagram_public": "4%", "forum": "2%"}
