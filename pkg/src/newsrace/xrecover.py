"""X publish-time recovery from snowflake ids, and tweet text via oEmbed."""

from __future__ import annotations

import html
import json
import logging
import re
import threading
import time
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol
from urllib.parse import urlsplit

from bs4 import BeautifulSoup

from .model import Mention

logger = logging.getLogger(__name__)

TWITTER_EPOCH_MS = 1_288_834_974_657
TIMESTAMP_SHIFT = 22
OEMBED_ENDPOINT = "https://publish.twitter.com/oembed"

_STATUS = re.compile(r"/status(?:es)?/(\d+)")
_TRAILING_DIGITS = re.compile(r"(\d+)/?$")


def parse_guid(guid: str | int) -> int:
    """Snowflake integer from a bare id or a status URL."""
    if isinstance(guid, int):
        raw = guid
    else:
        text = guid.strip()
        if text.isdigit():
            raw = int(text)
        else:
            path = urlsplit(text).path if "://" in text else ""
            m = _STATUS.search(path) or _TRAILING_DIGITS.search(path)
            if not m:
                raise ValueError(f"no snowflake digits in guid {guid!r}")
            raw = int(m.group(1))
    if not 0 <= raw < 1 << 64:
        raise ValueError(f"snowflake {raw} does not fit in 64 bits")
    return raw


def decode_snowflake(guid: str | int) -> int:
    """Unix milliseconds encoded in the high bits of an X snowflake."""
    return (parse_guid(guid) >> TIMESTAMP_SHIFT) + TWITTER_EPOCH_MS


def encode_snowflake(ms: int, low_bits: int = 0) -> int:
    """Smallest id (plus ``low_bits``) that decodes to ``ms``; used by fixtures."""
    if ms < TWITTER_EPOCH_MS:
        raise ValueError("timestamp precedes the Twitter epoch")
    if not 0 <= low_bits < 1 << TIMESTAMP_SHIFT:
        raise ValueError("low_bits must fit in 22 bits")
    return ((ms - TWITTER_EPOCH_MS) << TIMESTAMP_SHIFT) | low_bits


def status_url(author: str | None, guid: str | int) -> str:
    return f"https://twitter.com/{author or 'i'}/status/{parse_guid(guid)}"


@dataclass(frozen=True)
class OembedBody:
    text: str
    author: str
    fetched_at: int


class OembedUnavailable(Exception):
    """Deleted tweet (404) or an empty payload."""


def strip_tweet_html(markup: str) -> str:
    """Visible tweet text from an oEmbed blockquote.

    Only the first ``<p>`` of the blockquote is the tweet; the trailing
    "&mdash; author (@handle) date" line is attribution and is dropped.
    """
    if not markup or not markup.strip():
        return ""
    soup = BeautifulSoup(markup, "html.parser")
    for tag in soup(["script", "style"]):
        tag.decompose()
    para = soup.find("p")
    node = para if para is not None else soup
    for br in node.find_all("br"):
        br.replace_with(" ")
    text = node.get_text(" ")
    text = html.unescape(text)
    return re.sub(r"\s+", " ", text).strip()


class HttpGet(Protocol):
    def __call__(self, url: str, params: dict) -> tuple[int, str]: ...


def requests_get(timeout: float = 10.0) -> HttpGet:
    import requests

    session = requests.Session()
    session.headers["User-Agent"] = "newsrace/0.1 (research pipeline)"

    def get(url: str, params: dict) -> tuple[int, str]:
        resp = session.get(url, params=params, timeout=timeout)
        return resp.status_code, resp.text

    return get


def fixture_get(directory: Path) -> HttpGet:
    """Serve ``<guid>.json`` payloads from a directory; missing files are 404s."""
    directory = Path(directory)

    def get(url: str, params: dict) -> tuple[int, str]:
        guid = parse_guid(params["url"])
        path = directory / f"{guid}.json"
        if not path.exists():
            return 404, ""
        return 200, path.read_text(encoding="utf-8")

    return get


class OembedClient:
    """Cached oEmbed fetcher keyed by snowflake.

    The cache lives on disk (one JSON file per guid) so a resumed run never
    refetches; negative results are cached too.
    """

    def __init__(
        self,
        get: HttpGet,
        cache_dir: Path | None = None,
        retries: int = 3,
        backoff_s: float = 1.0,
        clock: Callable[[], float] = time.time,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.get = get
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.retries = retries
        self.backoff_s = backoff_s
        self.clock = clock
        self.sleep = sleep
        self._memo: dict[int, dict] = {}
        self._lock = threading.Lock()
        self.fetch_count = 0

    def _cache_path(self, guid: int) -> Path | None:
        return self.cache_dir / f"{guid}.json" if self.cache_dir else None

    def _cached(self, guid: int) -> dict | None:
        if guid in self._memo:
            return self._memo[guid]
        path = self._cache_path(guid)
        if path is not None and path.exists():
            entry = json.loads(path.read_text(encoding="utf-8"))
            self._memo[guid] = entry
            return entry
        return None

    def _store(self, guid: int, entry: dict) -> None:
        self._memo[guid] = entry
        path = self._cache_path(guid)
        if path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(entry, sort_keys=True), encoding="utf-8")

    def fetch(self, url: str) -> OembedBody:
        guid = parse_guid(url)
        with self._lock:
            entry = self._cached(guid)
            if entry is None:
                entry = self._fetch_remote(url)
                self._store(guid, entry)
        if entry.get("missing"):
            raise OembedUnavailable(entry.get("reason", "unavailable"))
        return OembedBody(entry["text"], entry["author"], entry["fetched_at"])

    def _fetch_remote(self, url: str) -> dict:
        params = {"url": url, "omit_script": "true", "dnt": "true"}
        last_exc: Exception | None = None
        for attempt in range(self.retries):
            try:
                status, payload = self.get(OEMBED_ENDPOINT, params)
            except Exception as exc:  # transport
                last_exc = exc
                self.sleep(self.backoff_s * 2**attempt)
                continue
            self.fetch_count += 1
            fetched_at = int(self.clock() * 1000)
            if status in (404, 403, 410):
                return {"missing": True, "reason": f"http {status}", "fetched_at": fetched_at}
            if status >= 500:
                last_exc = RuntimeError(f"oEmbed http {status}")
                self.sleep(self.backoff_s * 2**attempt)
                continue
            if status != 200:
                return {"missing": True, "reason": f"http {status}", "fetched_at": fetched_at}
            return self._parse(payload, fetched_at)
        raise RuntimeError(f"oEmbed fetch failed for {url}: {last_exc}")

    @staticmethod
    def _parse(payload: str, fetched_at: int) -> dict:
        if not payload or not payload.strip():
            return {"missing": True, "reason": "empty payload", "fetched_at": fetched_at}
        try:
            data = json.loads(payload)
        except json.JSONDecodeError:
            return {"missing": True, "reason": "unparseable payload", "fetched_at": fetched_at}
        text = strip_tweet_html(data.get("html") or "")
        if not text:
            return {"missing": True, "reason": "empty payload", "fetched_at": fetched_at}
        author = data.get("author_url") or data.get("author_name") or ""
        handle = author.rstrip("/").rsplit("/", 1)[-1] if author else ""
        return {"text": text, "author": handle, "fetched_at": fetched_at}


def fetch_oembed(url: str, client: OembedClient) -> OembedBody:
    return client.fetch(url)


def recover_mention(m: Mention, client: OembedClient | None) -> Mention:
    """Fill in a twitter mention's publish time and body.

    A guid that cannot be decoded leaves the mention undated, which keeps
    it out of earliest-selection. A missing oEmbed body leaves ``body``
    empty so verification marks it unverifiable.
    """
    if m.channel != "twitter":
        return m
    try:
        ts = decode_snowflake(m.guid)
    except ValueError as exc:
        logger.warning("undecodable guid %r: %s", m.guid, exc)
        return m.with_(recovered_ts=None)
    if client is None:
        return m.with_(recovered_ts=ts)
    url = m.url or status_url(m.author, m.guid)
    try:
        body = client.fetch(url)
    except OembedUnavailable:
        return m.with_(recovered_ts=ts, body=None)
    return m.with_(recovered_ts=ts, body=body.text, author=m.author or body.author or None)
