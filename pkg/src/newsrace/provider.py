"""Social-listening provider: rate limiting, saved-query lifecycle and pulls.

All provider calls go through one :class:`RateLimiter`. A per-event
:class:`QueryLifecycle` enforces create -> await backfill -> pull(all) ->
pull(twitter) -> delete. :class:`MockProvider` serves a fixture corpus and
redacts twitter dates the way the live provider does; :class:`BrandwatchProvider`
is the live adapter and the only place that knows endpoint shapes.
"""

from __future__ import annotations

import enum
import hashlib
import logging
import math
import os
import threading
import time
from collections import deque
from collections.abc import Callable, Iterable
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Protocol

from .drafting import BooleanQuery, QueryKind, parse_query
from .model import MS_PER_HOUR, MS_PER_MINUTE, Mention, iso, parse_ts
from .store import read_jsonl

logger = logging.getLogger(__name__)

DEFAULT_RATE_CAP = 28
DEFAULT_RATE_WINDOW_S = 600.0
DEFAULT_PAGE_SIZE = 100


# --- clocks ---------------------------------------------------------------------


class SystemClock:
    def now(self) -> float:
        return time.time()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class VirtualClock:
    """Deterministic clock for mock runs: sleeping only advances a counter."""

    def __init__(self, start: float = 0.0):
        self._t = start
        self._lock = threading.Lock()

    def now(self) -> float:
        return self._t

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            with self._lock:
                self._t += seconds

    def advance_to(self, t: float) -> None:
        with self._lock:
            self._t = max(self._t, t)


class Clock(Protocol):
    def now(self) -> float: ...

    def sleep(self, seconds: float) -> None: ...


# --- rate limiter -----------------------------------------------------------------


class RateLimiter:
    """Sliding-window limiter: at most ``cap`` grants in any ``window_s`` span.

    Grants are handed out in request order; ``acquire`` returns the earliest
    instant >= ``now`` (and >= the previous grant) that keeps the invariant.
    It never rejects.
    """

    def __init__(self, cap: int = DEFAULT_RATE_CAP, window_s: float = DEFAULT_RATE_WINDOW_S,
                 clock: Clock | None = None, audit: bool = False):
        if cap <= 0 or window_s <= 0:
            raise ValueError("cap and window must be positive")
        self.cap = cap
        self.window_s = window_s
        self.clock = clock or SystemClock()
        self._recent: deque[float] = deque()
        self._lock = threading.Lock()
        self.granted = 0
        self.history: list[float] | None = [] if audit else None

    def acquire(self, now: float | None = None) -> float:
        with self._lock:
            t = self.clock.now() if now is None else now
            if self._recent:
                t = max(t, self._recent[-1])
            if len(self._recent) >= self.cap:
                # the cap-th most recent grant must have left the window
                t = max(t, self._recent[-self.cap] + self.window_s)
            self._recent.append(t)
            while self._recent and self._recent[0] + self.window_s <= t:
                self._recent.popleft()
            self.granted += 1
            if self.history is not None:
                self.history.append(t)
            return t

    def wait(self) -> float:
        """Acquire a slot and sleep on the limiter's clock until it opens."""
        grant = self.acquire()
        delay = grant - self.clock.now()
        if delay > 0:
            self.clock.sleep(delay)
        return grant


def max_grants_in_window(grants: Iterable[float], window_s: float) -> int:
    """Largest number of grants inside any half-open window of length ``window_s``."""
    ts = sorted(grants)
    best = 0
    lo = 0
    for hi, t in enumerate(ts):
        # same comparison form as the limiter's grant arithmetic, so float rounding agrees
        while ts[lo] + window_s <= t:
            lo += 1
        best = max(best, hi - lo + 1)
    return best


# --- provider protocol ------------------------------------------------------------


class ProviderError(RuntimeError):
    def __init__(self, status: int, message: str):
        super().__init__(f"provider error {status}: {message}")
        self.status = status
        self.message = message

    @property
    def retryable(self) -> bool:
        return self.status >= 500 or self.status == 429


class Provider(Protocol):
    def create(self, boolean: str, name: str) -> str: ...

    def backfill(self, query_id: str) -> float: ...

    def mentions(self, query_id: str, start_ms: int, end_ms: int, page_size: int,
                 channel: str | None = None, page: int = 0) -> list[Mention]: ...

    def delete(self, query_id: str) -> None: ...


@dataclass(frozen=True)
class SavedQuery:
    provider_query_id: str
    boolean_rendered: str
    created_at: float
    backfill_percent: float = 0.0

    def observe(self, percent: float) -> SavedQuery:
        # reported coverage may jitter; keep the running maximum
        return replace(self, backfill_percent=max(self.backfill_percent, min(100.0, percent)))


class LifecycleState(str, enum.Enum):
    NEW = "new"
    CREATED = "created"
    BACKFILLED = "backfilled"
    PULLED_ALL = "pulled_all"
    PULLED_X = "pulled_x"
    DELETED = "deleted"
    ABORTED = "aborted"


class LifecycleError(RuntimeError):
    pass


_TRANSITIONS = {
    LifecycleState.NEW: {LifecycleState.CREATED, LifecycleState.ABORTED},
    LifecycleState.CREATED: {LifecycleState.BACKFILLED, LifecycleState.ABORTED},
    LifecycleState.BACKFILLED: {LifecycleState.PULLED_ALL, LifecycleState.ABORTED},
    LifecycleState.PULLED_ALL: {LifecycleState.PULLED_X, LifecycleState.ABORTED},
    LifecycleState.PULLED_X: {LifecycleState.DELETED},
    LifecycleState.ABORTED: {LifecycleState.DELETED},
    LifecycleState.DELETED: {LifecycleState.DELETED},
}


class QueryLifecycle:
    """Per-event state machine; an out-of-order step raises LifecycleError."""

    def __init__(self, event_id: str):
        self.event_id = event_id
        self.state = LifecycleState.NEW

    def advance(self, to: LifecycleState) -> None:
        if to not in _TRANSITIONS[self.state]:
            raise LifecycleError(f"{self.event_id}: cannot go from {self.state.value} to {to.value}")
        self.state = to

    def abort(self) -> None:
        if self.state not in (LifecycleState.DELETED, LifecycleState.PULLED_X, LifecycleState.ABORTED):
            self.state = LifecycleState.ABORTED


# --- lifecycle operations -----------------------------------------------------------


class ProviderSession:
    """Provider + limiter + clock, with bounded retries on 5xx/429."""

    def __init__(self, provider: Provider, limiter: RateLimiter, clock: Clock | None = None,
                 retries: int = 3, backoff_s: float = 5.0):
        self.provider = provider
        self.limiter = limiter
        self.clock = clock or limiter.clock
        self.retries = retries
        self.backoff_s = backoff_s
        self.requests = 0

    def call(self, fn: Callable, *args, **kwargs):
        for attempt in range(self.retries + 1):
            self.limiter.wait()
            self.requests += 1
            try:
                return fn(*args, **kwargs)
            except ProviderError as exc:
                if not exc.retryable or attempt == self.retries:
                    raise
                logger.info("retrying after %s", exc)
                self.clock.sleep(self.backoff_s * 2**attempt)
        raise AssertionError("unreachable")

    def create_query(self, lifecycle: QueryLifecycle, boolean: BooleanQuery | str,
                     name: str, existing_id: str | None = None) -> SavedQuery:
        """Create the saved query, or adopt ``existing_id`` recorded by an earlier attempt."""
        rendered = boolean.render() if isinstance(boolean, BooleanQuery) else boolean
        if existing_id:
            lifecycle.advance(LifecycleState.CREATED)
            return SavedQuery(existing_id, rendered, self.clock.now())
        qid = self.call(self.provider.create, rendered, name)
        lifecycle.advance(LifecycleState.CREATED)
        return SavedQuery(qid, rendered, self.clock.now())

    def await_backfill(self, lifecycle: QueryLifecycle, q: SavedQuery, floor_percent: float = 50.0,
                       cap_seconds: float = 90.0, poll_interval: float = 5.0) -> SavedQuery:
        """Poll until coverage reaches ``floor_percent`` or ``cap_seconds`` pass.

        Proceeds with whatever coverage was last reported. Poll failures use
        up time but never abort.
        """
        if lifecycle.state != LifecycleState.CREATED:
            raise LifecycleError(f"{lifecycle.event_id}: await_backfill in state {lifecycle.state.value}")
        start = self.clock.now()
        q = self._poll(q)
        while q.backfill_percent < floor_percent:
            elapsed = self.clock.now() - start
            if elapsed >= cap_seconds:
                break
            self.clock.sleep(min(poll_interval, cap_seconds - elapsed))
            if self.clock.now() - start >= cap_seconds:
                break
            q = self._poll(q)
        lifecycle.advance(LifecycleState.BACKFILLED)
        return q

    def _poll(self, q: SavedQuery) -> SavedQuery:
        try:
            self.limiter.wait()
            self.requests += 1
            return q.observe(self.provider.backfill(q.provider_query_id))
        except Exception as exc:  # counts against the cap, never aborts
            logger.info("backfill poll failed: %s", exc)
            return q

    def pull_mentions(self, lifecycle: QueryLifecycle, q: SavedQuery, window: tuple[int, int],
                      channel: str | None = None, page_size: int = DEFAULT_PAGE_SIZE,
                      max_pages: int = 1) -> list[Mention]:
        expected = LifecycleState.BACKFILLED if channel is None else LifecycleState.PULLED_ALL
        if lifecycle.state != expected:
            raise LifecycleError(
                f"{lifecycle.event_id}: pull({channel or 'all'}) in state {lifecycle.state.value}")
        start_ms, end_ms = window
        out: list[Mention] = []
        for page in range(max_pages):
            batch = self.call(self.provider.mentions, q.provider_query_id, start_ms, end_ms,
                              page_size, channel, page)
            out.extend(batch)
            if len(batch) < page_size:
                break
        lifecycle.advance(LifecycleState.PULLED_ALL if channel is None else LifecycleState.PULLED_X)
        return out

    def delete_query(self, lifecycle: QueryLifecycle, q: SavedQuery) -> bool:
        """Remove the saved query; failures are logged and reported as False."""
        lifecycle.advance(LifecycleState.DELETED)
        try:
            self.call(self.provider.delete, q.provider_query_id)
            return True
        except ProviderError as exc:
            logger.warning("delete of %s failed: %s", q.provider_query_id, exc)
            return False


def pull_window(t_e: int, pre_min: float = 30, post_h: float = 24) -> tuple[int, int]:
    """Inclusive [t_e - pre, t_e + post] in milliseconds."""
    return t_e - int(round(pre_min * MS_PER_MINUTE)), t_e + int(round(post_h * MS_PER_HOUR))


@dataclass
class PullResult:
    query: SavedQuery
    all_mentions: list[Mention]
    x_mentions: list[Mention]
    deleted: bool
    requests: int


def run_query_lifecycle(session: ProviderSession, event_id: str, boolean: BooleanQuery,
                        window: tuple[int, int], *, existing_id: str | None = None,
                        floor_percent: float = 50.0, cap_seconds: float = 90.0,
                        poll_interval: float = 5.0, page_size: int = DEFAULT_PAGE_SIZE,
                        max_pages: int = 1,
                        on_created: Callable[[SavedQuery], None] | None = None) -> PullResult:
    """One event's create -> await -> pull(all) -> pull(twitter) -> delete."""
    lifecycle = QueryLifecycle(event_id)
    before = session.requests
    q = session.create_query(lifecycle, boolean, name=f"newsrace-{event_id}", existing_id=existing_id)
    if on_created:
        on_created(q)
    try:
        q = session.await_backfill(lifecycle, q, floor_percent, cap_seconds, poll_interval)
        everything = session.pull_mentions(lifecycle, q, window, None, page_size, max_pages)
        xs = session.pull_mentions(lifecycle, q, window, "twitter", page_size, max_pages)
    except Exception:
        lifecycle.abort()
        session.delete_query(lifecycle, q)
        raise
    deleted = session.delete_query(lifecycle, q)
    return PullResult(q, everything, xs, deleted, session.requests - before)


def requests_per_event(polls: int, pulls: int = 2) -> int:
    """1 create + backfill polls + pulls + 1 delete."""
    return 1 + polls + pulls + 1


def requests_per_event_ceiling(cap_seconds: float = 90.0, poll_interval: float = 5.0,
                               pulls: int = 2) -> int:
    """Worst case: polling runs until the backfill wait cap."""
    return requests_per_event(math.ceil(cap_seconds / poll_interval), pulls)


def projected_wall_clock_s(n_requests: int, cap: int = DEFAULT_RATE_CAP,
                           window_s: float = DEFAULT_RATE_WINDOW_S) -> float:
    """Earliest instant the last of ``n_requests`` can be granted under the limiter."""
    if n_requests <= 0:
        return 0.0
    return ((n_requests - 1) // cap) * window_s


# --- mock provider ----------------------------------------------------------------------


@dataclass(frozen=True)
class MockDocument:
    guid: str
    channel: str
    ts: int
    text: str
    title: str | None = None
    snippet: str | None = None
    url: str | None = None
    author: str | None = None

    @property
    def index_text(self) -> str:
        return " ".join(p for p in (self.title, self.snippet, self.text) if p)


def load_documents(path: Path) -> list[MockDocument]:
    docs = []
    for rec in read_jsonl(Path(path)):
        docs.append(MockDocument(
            guid=str(rec["guid"]), channel=rec["channel"], ts=parse_ts(rec["ts"]),
            text=rec.get("text", ""), title=rec.get("title"), snippet=rec.get("snippet"),
            url=rec.get("url"), author=rec.get("author"),
        ))
    return docs


def parse_any_query(text: str) -> BooleanQuery:
    try:
        return parse_query(text, QueryKind.X_PERMISSIVE)
    except ValueError:
        return parse_query(text, QueryKind.NEWS_TIGHT)


class MockProvider:
    """Fixture-backed provider with the live service's observable behaviour.

    Matching: every AND-cluster needs an OR-term occurring case-insensitively
    in the document text. Results are date-sorted; twitter results carry no
    date, title or snippet (the live provider redacts them).

    ``backfill_schedule`` maps seconds since creation to reported percent;
    the default reports 100 immediately.
    """

    def __init__(self, documents: Iterable[MockDocument], clock: Clock | None = None,
                 backfill_schedule: Callable[[float], float] | None = None,
                 fail_create: Callable[[str], ProviderError | None] | None = None):
        self.documents = sorted(documents, key=lambda d: (d.ts, d.guid))
        self.clock = clock or VirtualClock()
        self.backfill_schedule = backfill_schedule or (lambda elapsed: 100.0)
        self.fail_create = fail_create
        self.registry: dict[str, dict] = {}
        self.calls: list[str] = []

    @staticmethod
    def query_id(boolean: str) -> str:
        return "mq-" + hashlib.sha1(boolean.encode("utf-8")).hexdigest()[:12]

    def create(self, boolean: str, name: str) -> str:
        self.calls.append("create")
        if self.fail_create:
            err = self.fail_create(boolean)
            if err:
                raise err
        try:
            parsed = parse_any_query(boolean)
        except ValueError as exc:
            raise ProviderError(400, f"malformed boolean: {exc}") from None
        qid = self.query_id(boolean)
        self.registry.setdefault(qid, {"query": parsed, "created": self.clock.now(), "name": name})
        return qid

    def _get(self, query_id: str) -> dict:
        if query_id not in self.registry:
            raise ProviderError(404, f"no such query {query_id}")
        return self.registry[query_id]

    def backfill(self, query_id: str) -> float:
        self.calls.append("backfill")
        entry = self._get(query_id)
        return float(self.backfill_schedule(self.clock.now() - entry["created"]))

    def mentions(self, query_id: str, start_ms: int, end_ms: int, page_size: int,
                 channel: str | None = None, page: int = 0) -> list[Mention]:
        self.calls.append("mentions")
        q: BooleanQuery = self._get(query_id)["query"]
        hits = [d for d in self.documents
                if start_ms <= d.ts <= end_ms
                and (channel is None or d.channel == channel)
                and q.matches(d.index_text)]
        return [self._to_mention(d) for d in hits[page * page_size:(page + 1) * page_size]]

    @staticmethod
    def _to_mention(d: MockDocument) -> Mention:
        if d.channel == "twitter":
            return Mention(channel="twitter", guid=d.guid, url=d.url, author=d.author)
        return Mention(channel=d.channel, guid=d.guid, provider_ts=d.ts, title=d.title,
                       snippet=d.snippet, url=d.url, author=d.author)

    def delete(self, query_id: str) -> None:
        self.calls.append("delete")
        self.registry.pop(query_id, None)


# --- live adapter -------------------------------------------------------------------------


PAGE_TYPE_TO_CHANNEL = {
    "twitter": "twitter",
    "x": "twitter",
    "news": "news",
    "bluesky": "bluesky",
    "facebook": "facebook_public",
    "facebook_public": "facebook_public",
    "youtube": "youtube",
    "instagram": "instagram_public",
    "instagram_public": "instagram_public",
    "forum": "forum",
    "reddit": "reddit",
    "blog": "blog",
}


class BrandwatchProvider:
    """Brandwatch Consumer Research REST adapter.

    Credentials come from ``BRANDWATCH_TOKEN`` and ``BRANDWATCH_PROJECT_ID``.
    The backfill percentage is read from ``backfill_field`` of the query
    resource; adjust it if the account exposes coverage under another key.
    """

    def __init__(self, session=None, token: str | None = None, project_id: str | None = None,
                 base_url: str = "https://api.brandwatch.com", backfill_field: str = "backfillPercentage",
                 timeout: float = 30.0, channel_map: dict[str, str] | None = None):
        import requests

        self.token = token or os.environ.get("BRANDWATCH_TOKEN")
        self.project_id = project_id or os.environ.get("BRANDWATCH_PROJECT_ID")
        if not self.token or not self.project_id:
            raise RuntimeError("BRANDWATCH_TOKEN and BRANDWATCH_PROJECT_ID must be set for live pulls")
        self.http = session or requests.Session()
        self.base = base_url.rstrip("/")
        self.backfill_field = backfill_field
        self.timeout = timeout
        self.channel_map = channel_map or PAGE_TYPE_TO_CHANNEL

    def _request(self, method: str, path: str, **kwargs):
        headers = {"Authorization": f"Bearer {self.token}"}
        resp = self.http.request(method, f"{self.base}/projects/{self.project_id}{path}",
                                 headers=headers, timeout=self.timeout, **kwargs)
        if resp.status_code >= 400:
            try:
                message = resp.json().get("errors") or resp.text
            except ValueError:
                message = resp.text
            raise ProviderError(resp.status_code, str(message))
        return resp.json() if resp.content else {}

    def create(self, boolean: str, name: str) -> str:
        body = {"name": name, "booleanQuery": boolean, "languages": ["en"], "type": "search string"}
        data = self._request("POST", "/queries/", json=body)
        return str(data["id"])

    def backfill(self, query_id: str) -> float:
        data = self._request("GET", f"/queries/{query_id}")
        return float(data.get(self.backfill_field) or 0.0)

    def mentions(self, query_id: str, start_ms: int, end_ms: int, page_size: int,
                 channel: str | None = None, page: int = 0) -> list[Mention]:
        params = {
            "queryId": query_id,
            "startDate": iso(start_ms),
            "endDate": iso(end_ms),
            "pageSize": page_size,
            "page": page,
            "orderBy": "date",
            "orderDirection": "asc",
        }
        if channel:
            page_types = [k for k, v in self.channel_map.items() if v == channel]
            params["pageType"] = page_types[0] if page_types else channel
        data = self._request("GET", "/data/mentions", params=params)
        return [m for m in (self.normalize(r) for r in data.get("results", [])) if m is not None]

    def normalize(self, raw: dict) -> Mention | None:
        channel = self.channel_map.get(str(raw.get("pageType", "")).lower())
        if channel is None:
            return None
        date = raw.get("date")
        provider_ts = parse_ts(date) if date else None
        return Mention(
            channel=channel,
            guid=str(raw.get("guid") or raw.get("resourceId") or raw.get("url")),
            provider_ts=provider_ts,
            title=raw.get("title") or None,
            snippet=raw.get("snippet") or None,
            body=None if channel == "twitter" else (raw.get("fullText") or None),
            url=raw.get("url") or None,
            author=raw.get("author") or None,
        )

    def delete(self, query_id: str) -> None:
        try:
            self._request("DELETE", f"/queries/{query_id}")
        except ProviderError as exc:
            if exc.status != 404:  # already gone counts as deleted
                raise
