"""Sample B: high-volume binary prediction markets, each pinned to its largest
rolling one-hour USD-volume spike.

USD amounts are held as integer cents so window sums and tie detection are exact.
"""

from __future__ import annotations

import csv
import re
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from datetime import date, datetime
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .model import MS_PER_HOUR, Event, Surface, parse_ts, to_ms

DEFAULT_FLOOR_USD = 100_000
DEFAULT_TOP_K = 130


def to_cents(value) -> int:
    amount = Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return int(amount * 100)


def _ts(value) -> int:
    if isinstance(value, datetime):
        return to_ms(value)
    if isinstance(value, date):
        return to_ms(value)
    return parse_ts(value)


def _flag(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in {"1", "true", "yes", "y", "t"}


@dataclass(frozen=True)
class MarketRecord:
    market_id: str
    event_title: str
    question: str
    window_start: int
    window_end: int
    volume_cents: int
    is_binary: bool
    event_slug: str = ""

    def __post_init__(self):
        if self.window_start > self.window_end:
            raise ValueError(f"market {self.market_id}: resolution window ends before it starts")
        if self.volume_cents < 0:
            raise ValueError(f"market {self.market_id}: negative volume")

    @property
    def lifetime_volume_usd(self) -> Decimal:
        return Decimal(self.volume_cents) / 100

    def overlaps(self, start: int, end: int) -> bool:
        return self.window_start <= end and self.window_end >= start


@dataclass(frozen=True)
class Trade:
    market_id: str
    ts: int
    usd_cents: int

    def __post_init__(self):
        if self.usd_cents < 0:
            raise ValueError("negative trade size")


@dataclass(frozen=True)
class SpikeResult:
    market_id: str
    spike_ts: int
    window_usd_cents: int

    def __post_init__(self):
        if self.window_usd_cents <= 0:
            raise ValueError("spike sum must be positive")

    @property
    def window_usd_sum(self) -> Decimal:
        return Decimal(self.window_usd_cents) / 100


def filter_markets(markets: Iterable[MarketRecord], window: tuple[int, int],
                   volume_floor_usd: int | float = DEFAULT_FLOOR_USD,
                   top_k: int = DEFAULT_TOP_K) -> list[MarketRecord]:
    start, end = window
    floor = to_cents(volume_floor_usd)
    best: dict[str, MarketRecord] = {}
    for m in markets:
        if not (m.is_binary and m.volume_cents >= floor and m.overlaps(start, end)):
            continue
        cur = best.get(m.event_title)
        if cur is None or (-m.volume_cents, m.market_id) < (-cur.volume_cents, cur.market_id):
            best[m.event_title] = m
    ranked = sorted(best.values(), key=lambda m: (-m.volume_cents, m.market_id))
    return ranked[:top_k]


def rolling_spike(trades: Sequence[Trade], scan: tuple[int, int],
                  window_ms: int = MS_PER_HOUR) -> SpikeResult | None:
    """Anchor at each trade time t in ``scan``; sum trades in (t - window, t].

    Returns the anchor with the largest sum, earliest on ties, or None when
    no positive-volume trade falls inside the scan.
    """
    for a, b in zip(trades, trades[1:]):
        if b.ts < a.ts:
            raise ValueError("trades must be sorted by timestamp")
    start, end = scan
    best: tuple[int, int] | None = None  # (sum, anchor)
    lo = 0
    running = 0
    i = 0
    n = len(trades)
    while i < n:
        t = trades[i].ts
        while i < n and trades[i].ts == t:
            running += trades[i].usd_cents
            i += 1
        while trades[lo].ts <= t - window_ms:
            running -= trades[lo].usd_cents
            lo += 1
        if start <= t <= end and running > 0 and (best is None or running > best[0]):
            best = (running, t)
    if best is None:
        return None
    return SpikeResult(trades[0].market_id, best[1], best[0])


_SPORTS = re.compile(
    r"\b(vs\.?|v\.?|nba|nfl|nhl|mlb|ufc|fifa|uefa|premier league|champions league|la liga|"
    r"serie a|bundesliga|super bowl|stanley cup|world cup|finals?|playoffs?|grand prix|f1|"
    r"masters|tournament|match|game|draft|fight|boxing|tennis|golf|cricket|fc|"
    r"lakers|celtics|knicks|warriors|thunder|nuggets|mavericks|pistons|spurs|cavaliers|"
    r"yankees|dodgers|arsenal|madrid|barcelona|liverpool)\b", re.I)
_POLITICS = re.compile(
    r"\b(election|elected|president|presidential|prime minister|minister|senate|congress|"
    r"parliament|vote|referendum|ceasefire|war|strikes?|invades?|invasion|sanctions|missile|"
    r"supreme court|impeach\w*|resign\w*|pope|conclave|trump|putin|zelensky|netanyahu|"
    r"khamenei|maduro|macron|starmer|erdogan|modi|iran|israel|ukraine|russia|nato|tariffs?|"
    r"governor|mayor|party|government|shutdown|greenland|hamas)\b", re.I)
_MACRO = re.compile(
    r"\b(fed|federal reserve|interest rates?|rate cut|rate hike|bps|inflation|cpi|gdp|"
    r"recession|unemployment|jobs report|bitcoin|btc|ethereum|eth|solana|crypto|"
    r"s&p|nasdaq|dow|stock|ipo|etf|price of|treasury|yields?|oil|wti|ecb)\b", re.I)


def categorize(event_title: str) -> str:
    """Keyword table over the event title; order matters where titles overlap."""
    if _MACRO.search(event_title):
        return "macro_crypto"
    if _SPORTS.search(event_title):
        return "sports"
    if _POLITICS.search(event_title):
        return "politics"
    return "other"


def market_event(m: MarketRecord, spike: SpikeResult) -> Event:
    return Event(
        event_id=f"pm-{m.market_id}",
        surface=Surface.POLYMARKET,
        title=m.event_title,
        description=m.question,
        category=categorize(m.event_title),
        t_e=spike.spike_ts,
        attention_prior=m.volume_cents / 100,
        source_key=m.market_id,
        group_key=m.event_slug or m.event_title,
    )


@dataclass
class PinResult:
    events: list[Event]
    spikes: dict[str, SpikeResult]
    dropped: list[str]


def pin_events(markets: Sequence[MarketRecord], trades: Mapping[str, Sequence[Trade]],
               scan: tuple[int, int]) -> PinResult:
    events, spikes, dropped = [], {}, []
    for m in markets:
        spike = rolling_spike(trades.get(m.market_id, ()), scan)
        if spike is None:
            dropped.append(m.market_id)
            continue
        spikes[m.market_id] = spike
        events.append(market_event(m, spike))
    return PinResult(events, spikes, dropped)


# --- loaders ---------------------------------------------------------------------

# column aliases seen across mirror dumps
_MARKET_COLS = {
    "market_id": ("market_id", "id", "condition_id"),
    "event_title": ("event_title", "event", "title"),
    "event_slug": ("event_slug", "slug"),
    "question": ("question", "market_question"),
    "start": ("start", "start_date", "window_start", "startDate"),
    "end": ("end", "end_date", "window_end", "endDate"),
    "volume": ("volume_usd", "volume", "lifetime_volume_usd"),
    "is_binary": ("is_binary", "binary"),
}
_TRADE_COLS = {
    "market_id": ("market_id", "id", "condition_id"),
    "ts": ("ts", "timestamp", "time"),
    "usd": ("usd_size", "usd", "usd_amount", "size_usd"),
}


def _pick(row: Mapping, names: Sequence[str], default=None):
    for n in names:
        if n in row and row[n] is not None and row[n] != "":
            return row[n]
    if default is not None:
        return default
    raise KeyError(f"missing column, expected one of {names}")


def _rows(path: Path) -> list[dict]:
    path = Path(path)
    if path.suffix == ".parquet":
        import pyarrow.parquet as pq

        return pq.read_table(path).to_pylist()
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def load_markets(path: Path) -> list[MarketRecord]:
    out = []
    for row in _rows(path):
        c = _MARKET_COLS
        title = str(_pick(row, c["event_title"]))
        out.append(MarketRecord(
            market_id=str(_pick(row, c["market_id"])),
            event_title=title,
            question=str(_pick(row, c["question"], title)),
            window_start=_ts(_pick(row, c["start"])),
            window_end=_ts(_pick(row, c["end"])),
            volume_cents=to_cents(_pick(row, c["volume"])),
            is_binary=_flag(_pick(row, c["is_binary"], True)),
            event_slug=str(_pick(row, c["event_slug"], "")),
        ))
    return out


def load_trades(path: Path) -> dict[str, list[Trade]]:
    by_market: dict[str, list[Trade]] = defaultdict(list)
    for row in _rows(path):
        c = _TRADE_COLS
        t = Trade(str(_pick(row, c["market_id"])), _ts(_pick(row, c["ts"])), to_cents(_pick(row, c["usd"])))
        by_market[t.market_id].append(t)
    for stream in by_market.values():
        stream.sort(key=lambda t: t.ts)
    return dict(by_market)


@dataclass
class PolymarketSeedReport:
    filtered: list[MarketRecord]
    pinned: PinResult

    @property
    def events(self) -> list[Event]:
        return self.pinned.events

    @property
    def distinct_groups(self) -> int:
        return len({e.group_key for e in self.pinned.events})


def seed_polymarket(markets_path: Path, trades_path: Path, window: tuple[int, int],
                    volume_floor_usd: int | float = DEFAULT_FLOOR_USD,
                    top_k: int = DEFAULT_TOP_K) -> PolymarketSeedReport:
    filtered = filter_markets(load_markets(markets_path), window, volume_floor_usd, top_k)
    trades = load_trades(trades_path)
    return PolymarketSeedReport(filtered, pin_events(filtered, trades, window))
