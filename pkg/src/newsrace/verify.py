"""On-topic verification and per-channel earliest-evidence selection.

Terms are case-folded, stripped of punctuation and matched on whole-word
boundaries; a multiword term matches as a contiguous word sequence. A
"distinct" match counts keyword terms, not positions.
"""

from __future__ import annotations

import logging
import re
import unicodedata
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass

from .drafting import BooleanQuery, ModelBackend
from .model import Event, Mention, Verification

logger = logging.getLogger(__name__)

X_MIN_MATCHES = 2
OTHER_MIN_MATCHES = 1


def normalize(text: str) -> str:
    """Case-fold, strip accents and punctuation, collapse whitespace. Idempotent."""
    text = unicodedata.normalize("NFKD", text)
    text = "".join(c for c in text if not unicodedata.combining(c))
    text = text.casefold()
    text = re.sub(r"[^\w\s]|_", " ", text)
    return " ".join(text.split())


@dataclass(frozen=True)
class KeywordSet:
    terms: tuple[str, ...]

    @classmethod
    def from_queries(cls, *queries: BooleanQuery) -> KeywordSet:
        return cls.from_terms(t for q in queries for t in q.terms())

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> KeywordSet:
        seen: list[str] = []
        for t in terms:
            n = normalize(t)
            if n and n not in seen:
                seen.append(n)
        return cls(tuple(seen))

    def matched(self, text: str | None) -> list[str]:
        """Distinct keyword terms occurring in ``text`` as whole-word sequences."""
        if not text:
            return []
        padded = f" {normalize(text)} "
        return [t for t in self.terms if f" {t} " in padded]


Adjudicator = Callable[[str, str], bool]


def backend_adjudicator(backend: ModelBackend, event: Event | None = None) -> Adjudicator:
    def adjudicate(text: str, keyword: str) -> bool:
        return backend.adjudicate(text, keyword, event)

    return adjudicate


def verify_x(m: Mention, keywords: KeywordSet, adjudicator: Adjudicator | None,
             transcript: list[dict] | None = None) -> Verification:
    """Two distinct terms verify; one goes to the adjudicator; none is pollution."""
    if m.channel != "twitter":
        raise ValueError("verify_x needs a twitter mention")
    if not m.body:
        return Verification.UNVERIFIABLE
    hits = keywords.matched(m.body)
    if len(hits) >= X_MIN_MATCHES:
        return Verification.VERIFIED
    if not hits:
        return Verification.POLLUTED
    if adjudicator is None:
        return Verification.AMBIGUOUS
    try:
        on_topic = bool(adjudicator(m.body, hits[0]))
    except Exception as exc:
        logger.warning("adjudicator failed for %s: %s", m.guid, exc)
        on_topic = False
    if transcript is not None:
        transcript.append({"guid": m.guid, "keyword": hits[0], "text": m.body, "on_topic": on_topic})
    return Verification.VERIFIED if on_topic else Verification.POLLUTED


def verify_other(m: Mention, keywords: KeywordSet) -> Verification:
    """Single-term threshold against title plus snippet."""
    if m.channel == "twitter":
        raise ValueError("verify_other is for non-twitter mentions")
    text = " ".join(p for p in (m.title, m.snippet) if p)
    if not text:
        return Verification.POLLUTED
    if len(keywords.matched(text)) >= OTHER_MIN_MATCHES:
        return Verification.VERIFIED
    return Verification.POLLUTED


def verify_mention(m: Mention, keywords: KeywordSet, adjudicator: Adjudicator | None,
                   transcript: list[dict] | None = None) -> Verification:
    if m.channel == "twitter":
        return verify_x(m, keywords, adjudicator, transcript)
    return verify_other(m, keywords)


@dataclass(frozen=True)
class ChannelEarliest:
    event_id: str
    channel: str
    mention: Mention
    fallback_depth: int

    def __post_init__(self):
        if self.mention.verification != Verification.VERIFIED:
            raise ValueError("ChannelEarliest needs a verified mention")
        if self.fallback_depth < 0:
            raise ValueError("negative fallback depth")

    @property
    def ts(self) -> int:
        return self.mention.ts  # type: ignore[return-value]


def earliest_verified(
    event: Event,
    mentions: Mapping[str, Sequence[Mention]],
    keywords: KeywordSet,
    adjudicator: Adjudicator | None = None,
    *,
    clamp_pre_event_ms: int | None = None,
    transcript: list[dict] | None = None,
    verified_out: dict[str, list[Mention]] | None = None,
) -> list[ChannelEarliest]:
    """First verified mention per channel, walking each channel in time order.

    Mentions that fail verification are skipped (``fallback_depth`` counts
    them). ``clamp_pre_event_ms`` optionally discards mentions earlier than
    ``t_e - clamp``; off by default.
    """
    out = []
    for channel in sorted(mentions):
        ordered = sorted(
            (m for m in mentions[channel] if m.ts is not None),
            key=lambda m: (m.ts, m.guid),
        )
        checked: list[Mention] = []
        depth = 0
        for m in ordered:
            if clamp_pre_event_ms is not None and m.ts < event.t_e - clamp_pre_event_ms:
                continue
            status = verify_mention(m, keywords, adjudicator, transcript)
            m = m.with_(verification=status)
            checked.append(m)
            if status == Verification.VERIFIED:
                out.append(ChannelEarliest(event.event_id, channel, m, depth))
                break
            depth += 1
        if verified_out is not None:
            verified_out[channel] = checked
    return out
