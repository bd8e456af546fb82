"""Result tables: hit rates, earliest-channel winners, paired X-vs-news
latency and the broadening probe.

All arithmetic is exact (``Fraction``); rounding happens only when rendering.
"""

from __future__ import annotations

import csv
import io
import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .drafting import BooleanQuery
from .model import CATEGORIES, CATEGORY_LABELS, Event, Mention, PairedDelta, Verification, iso
from .verify import ChannelEarliest

EarliestMap = Mapping[str, Sequence[ChannelEarliest]]


def to_fraction(value) -> Fraction:
    """Exact value of a decimal literal; floats go through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def round_half_up(value: Fraction, decimals: int = 0) -> Fraction:
    scale = 10**decimals
    scaled = abs(value) * scale
    q = math.floor(scaled + Fraction(1, 2))
    return Fraction(q if value >= 0 else -q, scale)


def fmt_fixed(value: Fraction, decimals: int = 2, signed: bool = False) -> str:
    r = round_half_up(value, decimals)
    sign = "-" if r < 0 else ("+" if signed and r > 0 else "")
    r = abs(r)
    whole = r.numerator // r.denominator
    if decimals == 0:
        return f"{sign}{whole}"
    frac = int((r - whole) * 10**decimals)
    return f"{sign}{whole}.{frac:0{decimals}d}"


def fmt_percent(value: Fraction, decimals: int = 0) -> str:
    return fmt_fixed(value * 100, decimals) + "%"


# --- hit rates -----------------------------------------------------------------------


@dataclass(frozen=True)
class HitRateRow:
    category: str
    hits: int
    total: int

    def __post_init__(self):
        if not 0 <= self.hits <= self.total:
            raise ValueError("hits must lie in [0, total]")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.hits, self.total) if self.total else Fraction(0)

    def render(self, decimals: int = 0) -> str:
        return f"{self.hits}/{self.total} ({fmt_percent(self.rate, decimals)})"


def hit_rates(events: Sequence[Event], earliest: EarliestMap,
              warn: Callable[[str], None] | None = None) -> list[HitRateRow]:
    """Per-category rows in fixed order, then an ``all`` row; empty for no events."""
    if not events:
        return []
    hits: dict[str, int] = defaultdict(int)
    totals: dict[str, int] = defaultdict(int)
    for e in events:
        cat = e.category
        if cat not in CATEGORIES:
            if warn:
                warn(f"{e.event_id}: unknown category {cat!r} counted as other")
            cat = "other"
        totals[cat] += 1
        if earliest.get(e.event_id):
            hits[cat] += 1
    rows = [HitRateRow(c, hits[c], totals[c]) for c in CATEGORIES if totals[c]]
    rows.append(HitRateRow("all", sum(hits.values()), sum(totals.values())))
    return rows


# --- winners ---------------------------------------------------------------------


@dataclass(frozen=True)
class WinnerRow:
    channel: str
    wins: Fraction
    share: Fraction


def event_winners(chans: Sequence[ChannelEarliest]) -> dict[str, Fraction]:
    """Channel -> fraction of this event's win; equal-ms ties split evenly."""
    if not chans:
        return {}
    first = min(c.ts for c in chans)
    tied = sorted({c.channel for c in chans if c.ts == first})
    return {ch: Fraction(1, len(tied)) for ch in tied}


def winner_shares(earliest: EarliestMap, channels: Iterable[str] = ()) -> list[WinnerRow]:
    """Rows by descending share, ties lexicographic. ``channels`` are listed even at zero."""
    wins: dict[str, Fraction] = {ch: Fraction(0) for ch in channels}
    n = 0
    for chans in earliest.values():
        split = event_winners(chans)
        if not split:
            continue
        n += 1
        for ch, part in split.items():
            wins[ch] = wins.get(ch, Fraction(0)) + part
    if n == 0:
        return [WinnerRow(ch, Fraction(0), Fraction(0)) for ch in sorted(wins)]
    rows = [WinnerRow(ch, w, w / n) for ch, w in wins.items()]
    return sorted(rows, key=lambda r: (-r.share, r.channel))


# --- paired deltas ---------------------------------------------------------------


@dataclass(frozen=True)
class LatencySummary:
    n: int
    median_min: Fraction | None
    q1_min: Fraction | None
    q3_min: Fraction | None
    x_first: int

    @property
    def x_first_share(self) -> Fraction | None:
        return Fraction(self.x_first, self.n) if self.n else None

    @property
    def news_first(self) -> int:
        return self.n - self.x_first


def median(values: Sequence[Fraction]) -> Fraction:
    s = sorted(values)
    n = len(s)
    if n == 0:
        raise ValueError("median of empty sequence")
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2


def quartile(values: Sequence[Fraction], which: int) -> Fraction:
    """Nearest order statistic at 1-based position which*(n+1)/4, halves rounded up, clamped."""
    if which not in (1, 3):
        raise ValueError("which must be 1 or 3")
    s = sorted(values)
    n = len(s)
    pos = math.floor(Fraction(which * (n + 1), 4) + Fraction(1, 2))
    return s[min(max(pos, 1), n) - 1]


def summarize_deltas(deltas: Iterable) -> LatencySummary:
    values = [to_fraction(d) for d in deltas]
    if not values:
        return LatencySummary(0, None, None, None, 0)
    return LatencySummary(
        n=len(values),
        median_min=median(values),
        q1_min=quartile(values, 1),
        q3_min=quartile(values, 3),
        x_first=sum(1 for v in values if v > 0),
    )


def paired_deltas(earliest: EarliestMap) -> tuple[list[PairedDelta], LatencySummary]:
    """Events with verified twitter and news evidence, sorted by delta then id."""
    pairs = []
    for event_id, chans in earliest.items():
        by = {c.channel: c for c in chans}
        if "twitter" in by and "news" in by:
            pairs.append(PairedDelta(event_id, by["news"].ts, by["twitter"].ts))
    pairs.sort(key=lambda p: (p.delta, p.event_id))
    return pairs, summarize_deltas(p.delta for p in pairs)


def earliest_from_store(event_id: str, mentions: Iterable[Mention]) -> list[ChannelEarliest]:
    """Rebuild per-channel earliest evidence from persisted verified mentions."""
    by_channel: dict[str, list[Mention]] = defaultdict(list)
    skipped: dict[str, int] = defaultdict(int)
    for m in sorted(mentions, key=lambda m: (m.channel, m.ts if m.ts is not None else 0, m.guid)):
        if m.ts is None:
            continue
        if m.verification == Verification.VERIFIED:
            by_channel[m.channel].append(m)
        elif not by_channel[m.channel]:
            skipped[m.channel] += 1
    return [ChannelEarliest(event_id, ch, ms[0], skipped[ch]) for ch, ms in sorted(by_channel.items()) if ms]


# --- probe -----------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeLevel:
    level: int
    query: str
    count: int
    earliest_ts: int | None
    earliest_title: str | None
    error: str | None = None


def probe_report(event: Event, ladder: Sequence[BooleanQuery],
                 pull: Callable[[BooleanQuery], Sequence[Mention]]) -> list[ProbeLevel]:
    """Run each ladder level through ``pull``; a failing level is recorded and skipped."""
    out = []
    for i, q in enumerate(ladder, start=1):
        try:
            found = [m for m in pull(q) if m.ts is not None]
        except Exception as exc:
            out.append(ProbeLevel(i, q.render(), 0, None, None, error=str(exc) or type(exc).__name__))
            continue
        first = min(found, key=lambda m: (m.ts, m.guid)) if found else None
        title = None
        if first is not None:
            title = first.title or first.body or first.snippet or first.url
        out.append(ProbeLevel(i, q.render(), len(found), first.ts if first else None, title))
    return out


# --- rendering ---------------------------------------------------------------------


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def txt(self) -> str:
        widths = [len(h) for h in self.header]
        for row in self.rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]

        def line(cells):
            return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()

        out = [line(self.header), line("-" * w for w in widths)]
        out.extend(line(r) for r in self.rows)
        return "\n".join(out) + "\n"

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        w.writerows(self.rows)
        return buf.getvalue()

    def md(self) -> str:
        def esc(c: str) -> str:
            return c.replace("|", "\\|")

        out = ["| " + " | ".join(esc(h) for h in self.header) + " |",
               "|" + "|".join("---" for _ in self.header) + "|"]
        out.extend("| " + " | ".join(esc(c) for c in r) + " |" for r in self.rows)
        return "\n".join(out) + "\n"

    def write(self, directory: Path, name: str) -> dict[str, Path]:
        directory.mkdir(parents=True, exist_ok=True)
        paths = {}
        for ext, body in (("txt", self.txt()), ("csv", self.csv()), ("md", self.md())):
            path = directory / f"{name}.{ext}"
            path.write_text(body, encoding="utf-8")
            paths[ext] = path
        return paths


def hits_table(samples: Mapping[str, Sequence[HitRateRow]]) -> Table:
    names = list(samples)
    cells: dict[str, dict[str, str]] = defaultdict(dict)
    for name, rows in samples.items():
        for r in rows:
            cells[r.category][name] = r.render()
    order = [c for c in (*CATEGORIES, "all") if c in cells]
    rows = tuple(
        (CATEGORY_LABELS.get(c, "All"), *(cells[c].get(n, "-") for n in names)) for c in order
    )
    return Table(("category", *names), rows)


def winners_table(samples: Mapping[str, Sequence[WinnerRow]]) -> Table:
    names = list(samples)
    shares: dict[str, dict[str, Fraction]] = defaultdict(dict)
    for name, rows in samples.items():
        for r in rows:
            shares[r.channel][name] = r.share
    lead = names[0] if names else None

    def key(ch: str):
        return (-shares[ch].get(lead, Fraction(0)), ch)

    header = ["channel", *names]
    if len(names) == 2:
        header.append("delta_pts")
    rows = []
    for ch in sorted(shares, key=key):
        row = [ch, *(fmt_percent(shares[ch][n]) if n in shares[ch] else "-" for n in names)]
        if len(names) == 2:
            a, b = (shares[ch].get(n) for n in names)
            if a is None or b is None:
                row.append("-")
            else:
                pts = round_half_up(b * 100) - round_half_up(a * 100)
                row.append(fmt_fixed(pts, 0, signed=True))
        rows.append(tuple(row))
    return Table(tuple(header), tuple(rows))


def _stat(v: Fraction | None) -> str:
    return "-" if v is None else fmt_fixed(v, 2)


def paired_table(pairs: Sequence[PairedDelta], summary: LatencySummary,
                 titles: Mapping[str, str] | None = None) -> Table:
    titles = titles or {}
    rows = [
        (p.event_id, titles.get(p.event_id, ""), iso(p.t_news), iso(p.t_x), fmt_fixed(p.delta, 2, signed=True))
        for p in pairs
    ]
    share = summary.x_first_share
    rows += [
        ("n", "", "", "", str(summary.n)),
        ("median", "", "", "", _stat(summary.median_min)),
        ("q1", "", "", "", _stat(summary.q1_min)),
        ("q3", "", "", "", _stat(summary.q3_min)),
        ("x_first", "", "", "", "-" if share is None else f"{summary.x_first}/{summary.n} ({fmt_percent(share)})"),
    ]
    return Table(("event_id", "title", "t_news", "t_x", "delta_min"), tuple(rows))


def probe_table(reports: Mapping[str, Sequence[ProbeLevel]]) -> Table:
    rows = []
    for event_id in sorted(reports):
        for lv in reports[event_id]:
            rows.append((
                event_id,
                str(lv.level),
                lv.query,
                "error" if lv.error else str(lv.count),
                iso(lv.earliest_ts) if lv.earliest_ts is not None else "-",
                (lv.earliest_title or "-") if not lv.error else lv.error,
            ))
    return Table(("event_id", "level", "query", "mentions", "earliest_ts", "earliest"), tuple(rows))
