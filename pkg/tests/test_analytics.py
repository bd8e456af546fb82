import random
from fractions import Fraction

import pytest

from newsrace.analytics import (
    HitRateRow,
    Table,
    earliest_from_store,
    fmt_fixed,
    fmt_percent,
    hit_rates,
    median,
    paired_deltas,
    probe_report,
    quartile,
    round_half_up,
    summarize_deltas,
    winner_shares,
)
from newsrace.drafting import BooleanQuery
from newsrace.model import Event, Mention, Verification
from newsrace.provider import MockDocument, MockProvider
from newsrace.verify import ChannelEarliest

import oracles
import reference as ref

T = 1_776_000_000_000
MIN = 60_000


def ev(i, cat="sports"):
    return Event(f"e{i}", "wcep", f"t{i}", "d", cat, T, 1.0, f"k{i}")


def ce(eid, channel, ts):
    m = Mention(channel, f"{eid}-{channel}", provider_ts=None if channel == "twitter" else ts,
                recovered_ts=ts if channel == "twitter" else None, verification=Verification.VERIFIED)
    return ChannelEarliest(eid, channel, m, 0)


class TestRounding:
    @pytest.mark.parametrize("value,dec,want", [
        (Fraction(38, 50), 0, "76%"), (Fraction(56, 109), 0, "51%"), (Fraction(171, 586), 1, "29.2%"),
        (Fraction(6, 16), 0, "38%"), (Fraction(1, 8), 0, "13%"), (Fraction(0), 0, "0%"),
    ])
    def test_percent(self, value, dec, want):
        assert fmt_percent(value, dec) == want

    def test_half_up_is_symmetric(self):
        assert round_half_up(Fraction(-5, 2)) == -3
        assert fmt_fixed(Fraction("-0.025"), 2) == "-0.03"
        assert fmt_fixed(Fraction("552.17"), 2, signed=True) == "+552.17"
        assert fmt_fixed(Fraction(0), 2, signed=True) == "0.00"


class TestLatency:
    def test_sample_a_deltas(self):
        s = summarize_deltas(ref.PAIRED_A)
        assert s.median_min == Fraction("-21.6")
        assert (s.q1_min, s.q3_min) == (Fraction("-33.4"), Fraction("-10.0"))
        assert s.x_first == 0 and s.news_first == 6

    def test_sample_b_deltas(self):
        s = summarize_deltas(ref.PAIRED_B)
        assert s.median_min == Fraction("-0.02")
        assert s.x_first_share == Fraction(6, 16)
        assert fmt_percent(s.x_first_share) == "38%"
        ordered = sorted(ref.PAIRED_B)
        for got, want in ((s.q1_min, ref.IQR_B[0]), (s.q3_min, ref.IQR_B[1])):
            assert abs(ordered.index(got) - ordered.index(want)) <= 1

    def test_quartiles_against_oracle(self):
        rng = random.Random(2)
        for n in range(1, 40):
            xs = [Fraction(rng.randrange(-1000, 1000), 10) for _ in range(n)]
            for k in (1, 3):
                assert quartile(xs, k) == oracles.nearest_rank_quartile(xs, k)
            assert quartile(xs, 1) <= median(xs) <= quartile(xs, 3)

    def test_single(self):
        s = summarize_deltas([Fraction(5)])
        assert s.median_min == s.q1_min == s.q3_min == 5

    def test_empty(self):
        s = summarize_deltas([])
        assert (s.n, s.median_min, s.q1_min, s.x_first_share) == (0, None, None, None)

    def test_paired_needs_both_channels(self):
        earliest = {"a": [ce("a", "news", T), ce("a", "twitter", T + 90_000)],
                    "b": [ce("b", "news", T)],
                    "c": [ce("c", "twitter", T), ce("c", "news", T + 30_000)]}
        pairs, s = paired_deltas(earliest)
        assert [(p.event_id, p.delta) for p in pairs] == [("a", Fraction(-3, 2)), ("c", Fraction(1, 2))]
        assert s.x_first == 1


class TestHits:
    def test_sample_sized_fixture(self):
        events, earliest = [], {}
        i = 0
        for cat, (hits, total) in ref.HITS_A.items():
            if cat == "all":
                continue
            for j in range(total):
                events.append(ev(i, cat))
                if j < hits:
                    earliest[f"e{i}"] = [ce(f"e{i}", "news", T)]
                i += 1
        rows = {r.category: r for r in hit_rates(events, earliest)}
        assert rows["all"].render() == "38/50 (76%)"
        assert rows["sports"].render() == "5/5 (100%)"
        assert rows["politics"].render() == "22/29 (76%)"

    def test_ratios(self):
        assert HitRateRow("all", *ref.HITS_B_ALL).render() == "56/109 (51%)"
        assert HitRateRow("sports", *ref.HITS_B_SPORTS).render() == "39/66 (59%)"
        assert HitRateRow("x", 171, 586).render(1) == "171/586 (29.2%)"
        with pytest.raises(ValueError):
            HitRateRow("x", 3, 2)

    def test_empty_and_unknown(self):
        assert hit_rates([], {}) == []
        warns = []
        rows = hit_rates([ev(1, "weather")], {}, warns.append)
        assert [(r.category, r.total) for r in rows] == [("other", 1), ("all", 1)]
        assert warns


class TestWinners:
    def test_single_channel(self):
        (row,) = winner_shares({"a": [ce("a", "news", T)]})
        assert (row.channel, row.share) == ("news", 1)

    def test_hand_counted(self):
        # winners by hand: twitter 4, news 3, bluesky 1.5, youtube 1.5 (one tie split)
        plan = [("twitter", "news"), ("twitter", "news"), ("twitter", "youtube"), ("twitter", "bluesky"),
                ("news", "twitter"), ("news", "bluesky"), ("news", "twitter"), ("bluesky", "news"),
                ("youtube", "twitter")]
        earliest = {f"e{i}": [ce(f"e{i}", a, T), ce(f"e{i}", b, T + MIN)] for i, (a, b) in enumerate(plan)}
        earliest["e9"] = [ce("e9", "bluesky", T), ce("e9", "youtube", T)]
        earliest["e10"] = []
        rows = {r.channel: r.share for r in winner_shares(earliest, ["reddit"])}
        assert rows == {"twitter": Fraction(4, 10), "news": Fraction(3, 10), "bluesky": Fraction(3, 20),
                        "youtube": Fraction(3, 20), "reddit": 0}
        assert sum(rows.values()) == 1

    def test_order(self):
        earliest = {"a": [ce("a", "news", T)], "b": [ce("b", "bluesky", T)], "c": [ce("c", "news", T)]}
        assert [r.channel for r in winner_shares(earliest)] == ["news", "bluesky"]


class TestStore:
    def test_rebuild_from_store(self):
        ms = [Mention("news", "p", provider_ts=T, verification=Verification.POLLUTED),
              Mention("news", "v", provider_ts=T + MIN, verification=Verification.VERIFIED),
              Mention("news", "v2", provider_ts=T + 2 * MIN, verification=Verification.VERIFIED),
              Mention("twitter", "1", recovered_ts=T, verification=Verification.UNVERIFIABLE)]
        (c,) = earliest_from_store("e", ms)
        assert (c.channel, c.mention.guid, c.fallback_depth) == ("news", "v", 1)


class TestProbe:
    Q = [BooleanQuery((("Markazi",), ("Pakistan",)), "x_permissive"),
         BooleanQuery((("Markazi", "school"), ("Pakistan",)), "x_permissive"),
         BooleanQuery((("Pakistan",),), "x_permissive")]

    def pull_from(self, docs):
        provider = MockProvider(docs)

        def pull(q):
            return provider.mentions(provider.create(q.render(), "p"), 0, 2 * T, 100)
        return pull

    def test_country_only_level_hits_other_story(self):
        docs = [MockDocument("n1", "news", T + 15 * 60 * MIN, "Polio team attacked in Pakistan",
                             title="Polio team attacked in Pakistan")]
        rep = probe_report(ev(1), self.Q, self.pull_from(docs))
        assert [lv.count for lv in rep] == [0, 0, 1]
        assert rep[-1].earliest_title == "Polio team attacked in Pakistan"

    def test_all_zero(self):
        assert [lv.count for lv in probe_report(ev(1), self.Q, self.pull_from([]))] == [0, 0, 0]

    def test_dense_monotone(self):
        rng = random.Random(4)
        words = ["Markazi", "school", "Pakistan", "Karachi", "flood"]
        docs = [MockDocument(f"n{i}", "news", T + i, " ".join(rng.sample(words, 2))) for i in range(200)]
        counts = [lv.count for lv in probe_report(ev(1), self.Q, self.pull_from(docs))]
        assert counts == sorted(counts) and counts[-1] > 0

    def test_error_level_continues(self):
        def pull(q):
            if len(q.clusters) == 2:
                raise RuntimeError("503")
            return []
        rep = probe_report(ev(1), self.Q, pull)
        assert [lv.error for lv in rep] == ["503", "503", None]


def test_table_rendering():
    t = Table(("a", "bb"), (("x", "1"), ("yyy", "22")))
    assert t.txt() == "a    bb\n---  --\nx    1\nyyy  22\n"
    assert t.csv().splitlines()[0] == "a,bb"
    assert t.md().startswith("| a | bb |")


class TestMockRun:
    """The packaged corpus run end to end reproduces the published tables."""

    def test_hits(self, mock_run):
        text = (mock_run[2] / "tables" / "hits.txt").read_text()
        assert "38/50 (76%)" in text and "56/109 (51%)" in text and "39/66 (59%)" in text

    def test_winners(self, mock_run):
        rows = {}
        for line in (mock_run[2] / "tables" / "winners.csv").read_text().splitlines()[1:]:
            ch, a, b, _ = line.split(",")
            rows[ch] = (a, b)
        for ch, share in ref.WINNERS_A.items():
            assert rows[ch][0] == share
        for ch, share in ref.WINNERS_B.items():
            assert rows[ch][1] == share

    def test_paired(self, mock_run):
        a = (mock_run[2] / "tables" / "paired_a.txt").read_text()
        b = (mock_run[2] / "tables" / "paired_b.txt").read_text()
        assert "-21.60" in a and "0/6 (0%)" in a
        assert "6/16 (38%)" in b and "+552.17" in b
