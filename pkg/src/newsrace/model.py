"""Shared domain types, millisecond time helpers and the channel taxonomy."""

from __future__ import annotations

import enum
from collections.abc import Iterable
from dataclasses import asdict, dataclass, fields
from datetime import date, datetime, timezone
from fractions import Fraction
from typing import Any

MS_PER_MINUTE = 60_000
MS_PER_HOUR = 3_600_000
MS_PER_DAY = 86_400_000

NAMED_CHANNELS = (
    "twitter",
    "news",
    "bluesky",
    "facebook_public",
    "youtube",
    "instagram_public",
    "forum",
)
DEFAULT_EXTRA_CHANNELS = ("reddit", "blog")

CATEGORIES = ("sports", "politics", "macro_crypto", "other")
CATEGORY_LABELS = {
    "sports": "Sports",
    "politics": "Politics & conflict",
    "macro_crypto": "Macro & tech",
    "other": "Other",
}


class Surface(str, enum.Enum):
    WCEP = "wcep"
    POLYMARKET = "polymarket"


class Verification(str, enum.Enum):
    UNVERIFIED = "unverified"
    VERIFIED = "verified"
    POLLUTED = "polluted"
    AMBIGUOUS = "ambiguous"
    # oEmbed 404 or empty payload: treated as a polluted candidate for fallback
    UNVERIFIABLE = "unverifiable"


class ChannelSet:
    """The active, duplicate-free channel set of one run."""

    def __init__(self, extra: Iterable[str] = DEFAULT_EXTRA_CHANNELS):
        names = list(NAMED_CHANNELS) + [e.strip().lower() for e in extra]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate channel labels in {names}")
        if any(not n for n in names):
            raise ValueError("empty channel label")
        self.names: tuple[str, ...] = tuple(names)

    def __contains__(self, name: object) -> bool:
        return name in self.names

    def __iter__(self):
        return iter(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def check(self, name: str) -> str:
        if name not in self.names:
            raise ValueError(f"unknown channel {name!r}; active set is {self.names}")
        return name


# --- time -----------------------------------------------------------------


def to_ms(value: datetime | date) -> int:
    """UTC milliseconds for an aware datetime, or midnight UTC for a date."""
    if not isinstance(value, datetime):
        value = datetime(value.year, value.month, value.day, tzinfo=timezone.utc)
    if value.tzinfo is None:
        raise ValueError("naive datetime; attach tzinfo=timezone.utc")
    delta = value - datetime(1970, 1, 1, tzinfo=timezone.utc)
    return (delta.days * MS_PER_DAY) + delta.seconds * 1000 + delta.microseconds // 1000


def from_ms(ms: int) -> datetime:
    seconds, millis = divmod(ms, 1000)
    return datetime.fromtimestamp(seconds, tz=timezone.utc).replace(microsecond=millis * 1000)


def iso(ms: int) -> str:
    """``2010-11-04T01:42:54.657Z`` style rendering."""
    dt = from_ms(ms)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


def parse_ts(text: str | int | float) -> int:
    """Accept ISO-8601 (``Z`` or offset), epoch seconds or epoch ms."""
    if isinstance(text, (int, float)):
        value = int(text)
        return value * 1000 if abs(value) < 10**11 else value
    text = text.strip()
    if text.lstrip("-").isdigit():
        return parse_ts(int(text))
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return to_ms(dt)


def day_ms(d: date) -> int:
    return to_ms(d)


def delta_minutes(t_news: int, t_x: int) -> Fraction:
    """Signed X-vs-news latency; positive when the X mention came first."""
    return Fraction(t_news - t_x, MS_PER_MINUTE)


# --- records ----------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    event_id: str
    surface: Surface
    title: str
    description: str
    category: str
    t_e: int
    attention_prior: float
    source_key: str
    # coarser grouping than the title, e.g. a prediction-market event slug
    group_key: str = ""

    def __post_init__(self):
        object.__setattr__(self, "surface", Surface(self.surface))
        if self.attention_prior < 0:
            raise ValueError(f"{self.event_id}: negative attention prior")
        if not self.source_key:
            raise ValueError(f"{self.event_id}: source_key required")


@dataclass(frozen=True)
class Mention:
    channel: str
    guid: str
    provider_ts: int | None = None
    recovered_ts: int | None = None
    title: str | None = None
    snippet: str | None = None
    body: str | None = None
    url: str | None = None
    author: str | None = None
    verification: Verification = Verification.UNVERIFIED

    def __post_init__(self):
        object.__setattr__(self, "verification", Verification(self.verification))

    @property
    def ts(self) -> int | None:
        """Ordering timestamp: recovered for twitter, provider-supplied elsewhere."""
        return self.recovered_ts if self.channel == "twitter" else self.provider_ts

    def with_(self, **changes: Any) -> Mention:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return Mention(**data)


@dataclass(frozen=True)
class FeatureVector:
    clock_edge: str = "unknown"
    live_visible: str = "unknown"
    institutional_source: str = "unknown"
    geographic_scope: str = "unknown"
    language_primary: str = "unknown"

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name):
                raise ValueError(f"feature axis {f.name} is empty")


@dataclass(frozen=True)
class PairedDelta:
    event_id: str
    t_news: int
    t_x: int

    @property
    def delta(self) -> Fraction:
        return delta_minutes(self.t_news, self.t_x)

    @property
    def delta_min(self) -> float:
        return float(self.delta)


# --- json helpers -------------------------------------------------------------


def to_record(obj: Any) -> dict:
    out = {}
    for k, v in asdict(obj).items():
        out[k] = v.value if isinstance(v, enum.Enum) else v
    return out


def event_from_record(data: dict) -> Event:
    return Event(**data)


def mention_from_record(data: dict) -> Mention:
    return Mention(**data)

