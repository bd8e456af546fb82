"""Reference implementations used as test oracles.

Each one is written independently of the package and favours obviousness
over speed.
"""

import re
import unicodedata
from datetime import datetime, timedelta, timezone

TWITTER_EPOCH = 1288834974657


def snowflake_ms(guid: int) -> int:
    # bits 22..63 hold the timestamp; integer division avoids shift operators
    return guid // (2 ** 22) + TWITTER_EPOCH


def snowflake_iso(guid: int) -> str:
    ms = snowflake_ms(guid)
    dt = datetime(1970, 1, 1, tzinfo=timezone.utc) + timedelta(milliseconds=ms)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


def spike(trades, scan, window_ms=3_600_000):
    """O(n^2): every distinct anchor time in the scan, summed from scratch."""
    best = None
    for t in sorted({ts for ts, _ in trades}):
        if not scan[0] <= t <= scan[1]:
            continue
        total = sum(c for ts, c in trades if t - window_ms < ts <= t)
        if total > 0 and (best is None or total > best[1]):
            best = (t, total)
    return best


def max_in_any_window(grants, window_s):
    """Largest number of grants inside any half-open window [t, t + window)."""
    grants = sorted(grants)
    return max((sum(1 for g in grants if s <= g < s + window_s) for s in grants), default=0)


def filter_markets(markets, window, floor_cents, top_k):
    """Filter, keep the best market per event title, rank; all by brute force."""
    ok = [m for m in markets
          if m["binary"] and m["cents"] >= floor_cents and m["start"] <= window[1] and m["end"] >= window[0]]
    kept = []
    for m in ok:
        rivals = [o for o in ok if o["title"] == m["title"]]
        top = min(rivals, key=lambda o: (-o["cents"], o["id"]))
        if top is m:
            kept.append(m)
    kept.sort(key=lambda o: (-o["cents"], o["id"]))
    return [m["id"] for m in kept[:top_k]]


def plain(text: str) -> str:
    text = "".join(c for c in unicodedata.normalize("NFKD", text) if not unicodedata.combining(c))
    return " ".join(re.sub(r"[^a-z0-9 ]", " ", text.lower()).split())


def term_count(text: str, terms) -> int:
    """Distinct terms present as whole-word runs of the plain-text form."""
    hay = f" {plain(text or '')} "
    found = {plain(t) for t in terms if plain(t) and f" {plain(t)} " in hay}
    return len(found)


def substring_match(query_clusters, text: str) -> bool:
    low = text.lower()
    return all(any(t.lower() in low for t in cluster) for cluster in query_clusters)


def nearest_rank_quartile(values, k):
    """Order statistic at floor(k(n+1)/4 + 1/2), clamped to [1, n]."""
    xs = sorted(values)
    n = len(xs)
    r = int(k * (n + 1) / 4 + 0.5)
    return xs[min(max(r, 1), n) - 1]
