"""Feature extraction, two-boolean drafting, the specificity gate and the
broadening ladder used by the coverage probe.

Query text syntax (what :meth:`BooleanQuery.render` emits and :func:`parse_query`
reads)::

    query   := cluster ( " AND " cluster )*
    cluster := "(" term ( " OR " term )* ")"
    term    := '"' <any characters except a double quote> '"'

Two model backends are shipped: :class:`FallbackBackend` (deterministic,
offline, rule based) and :class:`RemoteBackend` (an OpenAI-compatible chat
completion endpoint configured from environment variables).
"""

from __future__ import annotations

import enum
import json
import logging
import os
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from typing import Protocol

from . import lexicons as lx
from .model import Event, FeatureVector, Surface, iso

logger = logging.getLogger(__name__)

DEFAULT_SPECIFICITY_THRESHOLD = 0.5


class QueryKind(str, enum.Enum):
    NEWS_TIGHT = "news_tight"
    X_PERMISSIVE = "x_permissive"


CLUSTER_BOUNDS = {QueryKind.NEWS_TIGHT: (3, 4), QueryKind.X_PERMISSIVE: (1, 2)}


class QueryError(ValueError):
    pass


class BackendError(RuntimeError):
    pass


@dataclass(frozen=True)
class BooleanQuery:
    """AND of OR-sets. ``clusters`` is a tuple of tuples of terms."""

    clusters: tuple[tuple[str, ...], ...]
    kind: QueryKind

    def __post_init__(self):
        object.__setattr__(self, "kind", QueryKind(self.kind))
        object.__setattr__(self, "clusters", tuple(tuple(c) for c in self.clusters))
        lo, hi = CLUSTER_BOUNDS[self.kind]
        if not lo <= len(self.clusters) <= hi:
            raise QueryError(f"{self.kind.value} needs {lo}-{hi} clusters, got {len(self.clusters)}")
        for cluster in self.clusters:
            if not cluster:
                raise QueryError("empty OR-set")
            for term in cluster:
                if not isinstance(term, str) or not term.strip():
                    raise QueryError("empty term")
                if '"' in term:
                    raise QueryError(f"term contains a double quote: {term!r}")

    def render(self) -> str:
        return " AND ".join(
            "(" + " OR ".join(f'"{t}"' for t in cluster) + ")" for cluster in self.clusters
        )

    def terms(self) -> list[str]:
        seen, out = set(), []
        for cluster in self.clusters:
            for t in cluster:
                if t.casefold() not in seen:
                    seen.add(t.casefold())
                    out.append(t)
        return out

    def matches(self, text: str) -> bool:
        """Reference matching: every cluster has a term occurring case-insensitively."""
        folded = text.casefold()
        return all(any(t.casefold() in folded for t in cluster) for cluster in self.clusters)


_TOKEN_RE = re.compile(r'\s*(?:(\()|(\))|"([^"]*)"|(AND|OR)\b)')


def parse_query(text: str, kind: QueryKind | str) -> BooleanQuery:
    """Inverse of :meth:`BooleanQuery.render`."""
    pos, tokens = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise QueryError(f"unexpected input at {pos}: {text[pos:pos + 20]!r}")
        if m.group(1):
            tokens.append(("(", None))
        elif m.group(2):
            tokens.append((")", None))
        elif m.group(3) is not None:
            tokens.append(("TERM", m.group(3)))
        else:
            tokens.append((m.group(4), None))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1

    clusters: list[tuple[str, ...]] = []
    i = 0

    def expect(kind_: str) -> str | None:
        nonlocal i
        if i >= len(tokens) or tokens[i][0] != kind_:
            got = tokens[i][0] if i < len(tokens) else "end of input"
            raise QueryError(f"expected {kind_}, got {got}")
        value = tokens[i][1]
        i += 1
        return value

    while True:
        expect("(")
        terms = [expect("TERM")]
        while i < len(tokens) and tokens[i][0] == "OR":
            i += 1
            terms.append(expect("TERM"))
        expect(")")
        clusters.append(tuple(terms))
        if i == len(tokens):
            break
        expect("AND")
    return BooleanQuery(tuple(clusters), QueryKind(kind))


# --- entity and keyword extraction -----------------------------------------


def _is_capitalised(tok: str) -> bool:
    return tok[:1].isupper() or (tok[:1].isdigit() and any(c.isupper() for c in tok))


def extract_entities(text: str, known: Iterable[str] = ()) -> list[str]:
    """Maximal runs of capitalised tokens, in order of first appearance.

    Runs never cross punctuation. A run opening a sentence loses its first
    word when the remainder is itself a name seen elsewhere ("Singer Rivas
    Hernandez" after "Rivas Hernandez").
    """
    runs: list[tuple[list[str], bool]] = []
    run: list[str] = []
    run_at_start = False

    def flush():
        nonlocal run
        while run and run[-1].lower() in lx.CONNECTORS:
            run.pop()
        if run:
            runs.append((run, run_at_start))
        run = []

    for tok, broken, sentence_start in lx.word_spans(text):
        if broken:
            flush()
        low = tok.lower()
        if low in lx.VERSUS or lx.is_date_token(tok) or low in lx.COMMON_CAPS:
            flush()
        elif _is_capitalised(tok):
            if not run:
                run_at_start = sentence_start
            run.append(tok)
        elif low in lx.CONNECTORS and run:
            run.append(tok)
        else:
            flush()
    flush()

    names = [" ".join(r) for r, _ in runs]
    pool = {n.casefold() for n in names} | {k.casefold() for k in known}
    entities: list[str] = []
    seen: set[str] = set()
    for (r, at_start), name in zip(runs, names):
        if at_start and len(r) > 1 and " ".join(r[1:]).casefold() in pool:
            name = " ".join(r[1:])
        if name.casefold() not in seen:
            seen.add(name.casefold())
            entities.append(name)
    return entities


def event_entities(event: Event) -> list[str]:
    title_names = extract_entities(event.title)
    seen, out = set(), []
    table = lx.aliases()
    for name in title_names + extract_entities(event.description, known=title_names):
        # a name nested inside a kept one ("Khamenei" in "Ali Khamenei") adds nothing
        if name.casefold() not in seen and not any(_nested(name, kept) for kept in out):
            out.append(name)
            seen.add(name.casefold())
            seen |= {a.casefold() for a in table.get(name, [])}
    return out


def _nested(a: str, b: str) -> bool:
    wa, wb = [w.casefold() for w in lx.words(a)], [w.casefold() for w in lx.words(b)]
    short, long_ = sorted((wa, wb), key=len)
    return bool(short) and any(long_[i:i + len(short)] == short for i in range(len(long_) - len(short) + 1))


def countries_in(text: str) -> list[str]:
    found = []
    for name in lx.countries():
        if re.search(rf"(?<!\w){re.escape(name)}(?!\w)", text):
            found.append((text.find(name), name))
    return [name for _, name in sorted(found)]


def is_us_relevant(text: str) -> bool:
    return any(t.occurs_in(text) for t in lx.us_lexicon())


def forbidden_tokens(question: str) -> set[str]:
    """Outcome and deadline tokens of a prediction-market question."""
    out = set()
    for tok in lx.words(question):
        low = tok.lower()
        if low in lx.OUTCOME_WORDS or lx.is_date_token(tok):
            out.add(low)
    return out


def _term_forbidden(term: str, forbidden: set[str]) -> bool:
    ws = [w.lower() for w in lx.words(term)]
    if not ws:
        return True
    if term.casefold() in forbidden:
        return True
    if any(lx.is_date_token(w) for w in ws):
        return True
    return all(w in forbidden or w in lx.STOPWORDS for w in ws)


def strip_forbidden(q: BooleanQuery, question: str) -> BooleanQuery | None:
    """Drop outcome/deadline terms; ``None`` when nothing usable is left."""
    forbidden = forbidden_tokens(question)
    clusters = []
    for cluster in q.clusters:
        kept = tuple(t for t in cluster if not _term_forbidden(t, forbidden))
        if kept:
            clusters.append(kept)
    lo, hi = CLUSTER_BOUNDS[q.kind]
    if not lo <= len(clusters) <= hi:
        return None
    return BooleanQuery(tuple(clusters), q.kind)


def _keywords(text: str, exclude: set[str]) -> list[str]:
    out, seen = [], set(exclude)
    for term in exclude:
        seen |= {w.casefold() for w in lx.words(term)}
    for tok in lx.words(text):
        low = tok.casefold()
        if (len(tok) >= 4 and low not in lx.STOPWORDS and low not in seen
                and not lx.is_date_token(tok) and low not in lx.OUTCOME_WORDS):
            seen.add(low)
            out.append(tok)
    return out


def _dedupe(terms: Iterable[str]) -> tuple[str, ...]:
    seen, out = set(), []
    for t in terms:
        if t.casefold() not in seen:
            seen.add(t.casefold())
            out.append(t)
    return tuple(out)


# --- backends ---------------------------------------------------------------


class ModelBackend(Protocol):
    name: str

    def features(self, event: Event) -> FeatureVector: ...

    def draft(self, event: Event) -> tuple[BooleanQuery, BooleanQuery]: ...

    def specificity(self, q: BooleanQuery, event: Event | None = None) -> float: ...

    def adjudicate(self, text: str, keyword: str, event: Event | None = None) -> bool: ...


def _term_rarity(term: str) -> float:
    ws = lx.words(term)
    content = [w for w in ws if w.lower() not in lx.STOPWORDS and w.lower() not in lx.CONNECTORS]
    if not content:
        return 0.0
    if all(w.lower() in lx.EVENT_WORDS for w in content):
        return 0.3
    if any(_is_capitalised(w) or any(c.isdigit() for c in w) for w in content):
        return 0.9
    return 0.6


def fallback_specificity(clusters: Sequence[Sequence[str]]) -> float:
    """1 - prod(1 - s_i) over clusters, where s_i is the rarity of the broadest term."""
    if not clusters:
        return 0.0
    miss = 1.0
    for cluster in clusters:
        if not cluster:
            return 0.0
        miss *= 1.0 - min(_term_rarity(t) for t in cluster)
    return round(1.0 - miss, 6)


class FallbackBackend:
    """Keyword-rule backend. Pure: the same event always yields the same output."""

    name = "fallback"

    def features(self, event: Event) -> FeatureVector:
        desc_words = [w for w in lx.words(event.description) if any(c.isalpha() for c in w)]
        if len(desc_words) < 2:
            return FeatureVector()
        text = f"{event.title}. {event.description}"
        toks = {w.lower() for w in lx.words(text)}

        if toks & lx.UNSCHEDULED_WORDS:
            clock = "unscheduled"
        elif toks & lx.SCHEDULED_WORDS:
            clock = "scheduled"
        else:
            clock = "unknown"

        live_hit = bool(toks & lx.LIVE_WORDS) or event.category == "sports"
        inst_hit = bool(toks & lx.INSTITUTIONAL_WORDS)
        if live_hit:
            live = "yes"
        elif inst_hit or clock == "unscheduled":
            live = "no"
        else:
            live = "unknown"
        if inst_hit:
            institutional = "yes"
        elif live_hit:
            institutional = "no"
        else:
            institutional = "unknown"

        foreign = [c for c in countries_in(text) if c not in ("United States",)]
        us = is_us_relevant(text)
        if foreign:
            scope = "international"
        elif us:
            scope = "us_national"
        else:
            scope = "unknown"
        if foreign:
            language = lx.countries()[foreign[0]]
        elif us:
            language = "en"
        else:
            language = "unknown"
        return FeatureVector(clock, live, institutional, scope, language)

    def _x_clusters(self, event: Event, entities: list[str]) -> list[tuple[str, ...]]:
        table = lx.aliases()
        clusters = [_dedupe([e] + table.get(e, [])) for e in entities[:2]]
        if not clusters:
            kws = _keywords(f"{event.title} {event.description}", set())
            if kws:
                clusters = [tuple(kws[:3])]
        return clusters

    def draft(self, event: Event) -> tuple[BooleanQuery, BooleanQuery]:
        entities = event_entities(event)
        if event.surface == Surface.POLYMARKET:
            forbidden = forbidden_tokens(event.description) | forbidden_tokens(event.title)
            entities = [e for e in entities if not _term_forbidden(e, forbidden)]

        x_clusters = self._x_clusters(event, entities)
        if not x_clusters:
            raise QueryError(f"{event.event_id}: no usable terms for an X query")
        x = BooleanQuery(tuple(x_clusters), QueryKind.X_PERMISSIVE)
        if event.surface == Surface.POLYMARKET:
            x = strip_forbidden(x, f"{event.title} {event.description}") or x

        text = f"{event.title}. {event.description}"
        table = lx.aliases()
        news: list[tuple[str, ...]] = [_dedupe([e] + table.get(e, [])) for e in entities[:3]]
        used = {t.casefold() for c in news for t in c}
        toks = [w.lower() for w in lx.words(text)]
        topic = _dedupe(w for w in toks if w in lx.EVENT_WORDS and w not in used)
        if topic and len(news) < 4:
            news.append(topic[:3])
            used |= {t.casefold() for t in topic[:3]}
        geo = [c for c in countries_in(text) if c.casefold() not in used]
        if geo and len(news) < 4:
            news.append(tuple(geo[:3]))
            used |= {g.casefold() for g in geo[:3]}
        for kw in _keywords(text, used):
            if len(news) >= 3:
                break
            news.append((kw,))
            used.add(kw.casefold())
        for word in lx.TOPIC_WORDS.get(event.category, lx.TOPIC_WORDS["other"]):
            if len(news) >= 3:
                break
            if word not in used:
                news.append((word,))
                used.add(word)
        return BooleanQuery(tuple(news[:4]), QueryKind.NEWS_TIGHT), x

    def specificity(self, q: BooleanQuery, event: Event | None = None) -> float:
        return fallback_specificity(q.clusters)

    def adjudicate(self, text: str, keyword: str, event: Event | None = None) -> bool:
        """On-topic when the single matched keyword is a name and an event word co-occurs.

        ``keyword`` arrives normalized, so its rarity is judged on the surface
        form found in ``text``.
        """
        parts = [re.escape(w) for w in keyword.split()]
        found = re.search(r"(?<!\w)" + r"\W+".join(parts) + r"(?!\w)", text, re.I) if parts else None
        if _term_rarity(found.group(0) if found else keyword) < 0.9:
            return False
        toks = {w.lower() for w in lx.words(text)}
        return bool(toks & lx.EVENT_WORDS)


class RemoteBackend:
    """Chat-completion backend (OpenAI-compatible ``/chat/completions``).

    Configuration comes only from the environment: ``NEWSRACE_LLM_API_KEY``,
    ``NEWSRACE_LLM_URL`` and ``NEWSRACE_LLM_MODEL``.
    """

    name = "remote"

    def __init__(self, post: Callable[[str, dict, dict], dict] | None = None,
                 url: str | None = None, model: str | None = None, api_key: str | None = None):
        self.url = url or os.environ.get("NEWSRACE_LLM_URL", "https://api.openai.com/v1/chat/completions")
        self.model = model or os.environ.get("NEWSRACE_LLM_MODEL", "gpt-4o-mini")
        self.api_key = api_key or os.environ.get("NEWSRACE_LLM_API_KEY")
        if not self.api_key:
            raise BackendError("NEWSRACE_LLM_API_KEY is not set")
        self._post = post or _requests_post

    def _ask(self, prompt: str) -> dict:
        payload = {
            "model": self.model,
            "temperature": 0,
            "response_format": {"type": "json_object"},
            "messages": [{"role": "user", "content": prompt}],
        }
        headers = {"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"}
        try:
            reply = self._post(self.url, headers, payload)
            content = reply["choices"][0]["message"]["content"]
            return json.loads(content)
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise BackendError(f"malformed model reply: {exc}") from exc

    @staticmethod
    def _fmt(event: Event) -> dict:
        return {"title": event.title, "description": event.description, "t_e": iso(event.t_e)}

    def features(self, event: Event) -> FeatureVector:
        data = self._ask(lx.data_text("prompts/features.txt").format(**self._fmt(event)))
        axes = ("clock_edge", "live_visible", "institutional_source", "geographic_scope", "language_primary")
        return FeatureVector(**{a: str(data.get(a) or "unknown") for a in axes})

    def draft(self, event: Event) -> tuple[BooleanQuery, BooleanQuery]:
        rules = lx.data_text("prompts/polymarket_rules.txt") if event.surface == Surface.POLYMARKET else ""
        data = self._ask(lx.data_text("prompts/booleans.txt").format(polymarket_rules=rules, **self._fmt(event)))
        try:
            news = BooleanQuery(tuple(tuple(map(str, c)) for c in data["news"]), QueryKind.NEWS_TIGHT)
            x = BooleanQuery(tuple(tuple(map(str, c)) for c in data["x"]), QueryKind.X_PERMISSIVE)
        except (KeyError, TypeError, QueryError) as exc:
            raise BackendError(f"malformed boolean structure: {exc}") from exc
        return news, x

    def specificity(self, q: BooleanQuery, event: Event | None = None) -> float:
        fmt = self._fmt(event) if event else {"title": "", "description": "", "t_e": ""}
        data = self._ask(lx.data_text("prompts/specificity.txt").format(query=q.render(), **fmt))
        value = float(data["specificity"])
        return min(1.0, max(0.0, value))

    def adjudicate(self, text: str, keyword: str, event: Event | None = None) -> bool:
        fmt = self._fmt(event) if event else {"title": "", "description": "", "t_e": ""}
        data = self._ask(lx.data_text("prompts/adjudicate.txt").format(keyword=keyword, text=text, **fmt))
        return bool(data["on_topic"])


def _requests_post(url: str, headers: dict, payload: dict) -> dict:
    import requests

    resp = requests.post(url, headers=headers, json=payload, timeout=60)
    resp.raise_for_status()
    return resp.json()


def make_backend(mode: str) -> ModelBackend:
    if mode == "fallback":
        return FallbackBackend()
    if mode == "remote":
        return RemoteBackend()
    raise ValueError(f"unknown backend {mode!r}")


# --- stage operations -------------------------------------------------------


def extract_features(event: Event, backend: ModelBackend,
                     warn: Callable[[str], None] | None = None) -> FeatureVector:
    """Five covariate axes; backend failures degrade to all-``unknown``."""
    if not event.description.strip():
        raise ValueError(f"{event.event_id}: empty description")
    try:
        return backend.features(event)
    except Exception as exc:
        if warn:
            warn(f"feature extraction failed ({exc}); axes set to unknown")
        return FeatureVector()


def draft_booleans(event: Event, backend: ModelBackend,
                   warn: Callable[[str], None] | None = None) -> tuple[BooleanQuery, BooleanQuery]:
    """News (tight) and X (permissive) queries for one event.

    A malformed backend reply is retried once, then the rule-based drafter
    takes over. Prediction-market X queries never carry outcome or deadline
    terms, whichever backend drafted them.
    """
    if not (event.title.strip() or event.description.strip()):
        raise ValueError(f"{event.event_id}: empty title and description")
    result = None
    for attempt in range(2):
        try:
            result = backend.draft(event)
            break
        except (BackendError, QueryError) as exc:
            if warn:
                warn(f"drafting attempt {attempt + 1} failed: {exc}")
    if result is None:
        result = FallbackBackend().draft(event)
    news, x = result
    if event.surface == Surface.POLYMARKET:
        cleaned = strip_forbidden(x, f"{event.title} {event.description}")
        if cleaned is None:
            if warn:
                warn("X query only carried outcome/deadline terms; using rule-based drafter")
            _, x = FallbackBackend().draft(event)
        else:
            x = cleaned
    return news, x


@dataclass(frozen=True)
class SpecificityScore:
    value: float
    threshold: float
    reason: str = ""

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0 or not 0.0 <= self.threshold <= 1.0:
            raise ValueError("specificity values must lie in [0, 1]")

    @property
    def approved(self) -> bool:
        return self.value >= self.threshold


def specificity_gate(q: BooleanQuery | Sequence[Sequence[str]] | None, backend: ModelBackend,
                     threshold: float = DEFAULT_SPECIFICITY_THRESHOLD,
                     event: Event | None = None) -> SpecificityScore:
    if q is None or not isinstance(q, BooleanQuery):
        clusters = list(q or [])
        if not clusters or any(not c for c in clusters):
            return SpecificityScore(0.0, threshold, "empty query")
        return SpecificityScore(fallback_specificity(clusters), threshold)
    try:
        value = backend.specificity(q, event)
    except Exception as exc:
        logger.warning("specificity backend failed (%s); using rule score", exc)
        value = fallback_specificity(q.clusters)
    return SpecificityScore(value, threshold)


# --- broadening ladder --------------------------------------------------------


def _geo_terms(event: Event) -> list[str]:
    text = f"{event.title}. {event.description}"
    found = [c for c in countries_in(text) if c != "United States"]
    if found:
        return found
    scope = FallbackBackend().features(event).geographic_scope
    if scope == "us_national" or is_us_relevant(text):
        return ["United States", "U.S."]
    return []


def _is_geo_cluster(cluster: Sequence[str]) -> bool:
    table = lx.countries()
    return all(t in table or t in ("United States", "U.S.") for t in cluster)


def _widening_terms(q: BooleanQuery, event: Event) -> list[str]:
    cands: list[str] = []
    for cluster in q.clusters:
        for term in cluster:
            ws = [w for w in lx.words(term) if w.lower() not in lx.CONNECTORS]
            if len(ws) > 1:
                cands += [w for w in (ws[0], ws[-1]) if len(w) >= 4 and w.lower() not in lx.STOPWORDS]
            cands += lx.aliases().get(term, [])
    text_words = [w.lower() for w in lx.words(f"{event.title}. {event.description}")]
    cands += [w for w in text_words if w in lx.EVENT_WORDS]
    cands += list(lx.TOPIC_WORDS.get(event.category, lx.TOPIC_WORDS["other"]))
    for words in lx.TOPIC_WORDS.values():
        cands += list(words)
    present = {t.casefold() for t in q.terms()}
    out = []
    for c in cands:
        if c.casefold() not in present and len(c) > 1:
            present.add(c.casefold())
            out.append(c)
    return out


def broaden_ladder(x: BooleanQuery, event: Event, levels: int = 5) -> list[BooleanQuery]:
    """Progressively weaker queries, from ``x`` as drafted to a country-level OR-set.

    Each step either widens one OR-set by a term or drops one AND-cluster, so
    under the reference matching semantics every level matches a superset of
    the documents matched by the level before. When ``x`` carries a
    geographic cluster the last level is exactly that country OR-set;
    otherwise it is the OR of every surviving term plus the event's country
    (or scope-label) terms, which is the broadest query that still contains
    the previous level.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    ladder = [x]
    if levels == 1:
        return ladder

    geo_idx = [i for i, c in enumerate(x.clusters) if _is_geo_cluster(c)]
    if len(geo_idx) == len(x.clusters):
        geo_idx = []
    geo = [x.clusters[i] for i in geo_idx]
    other = [list(c) for i, c in enumerate(x.clusters) if i not in geo_idx]
    pool = _widening_terms(x, event)

    def build() -> BooleanQuery:
        return BooleanQuery(tuple(tuple(c) for c in other) + tuple(geo), x.kind)

    for step in range(levels - 2):
        can_drop = len(other) >= 2
        if step % 2 == 1 and can_drop:
            # drop the most specific remaining cluster
            scores = [fallback_specificity([c]) for c in other[:-1]]
            other.pop(scores.index(max(scores)))
        elif pool:
            other[-1].append(pool.pop(0))
        elif can_drop:
            other.pop(0)
        else:
            raise QueryError("ran out of ways to broaden the query")
        ladder.append(build())

    if geo:
        final = _dedupe(t for c in geo for t in c)
    else:
        final = _dedupe([t for c in other for t in c] + _geo_terms(event))
        if len(other) == 1 and len(final) == len(other[0]):
            if not pool:
                raise QueryError("ran out of ways to broaden the query")
            final = final + (pool.pop(0),)
    ladder.append(BooleanQuery((final,), x.kind))
    return ladder
