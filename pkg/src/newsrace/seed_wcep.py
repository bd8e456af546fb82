"""Sample A: Wikipedia Current Events Portal bullets, U.S.-filtered and ranked
by English Wikipedia pageviews with a per-article cap."""

from __future__ import annotations

import csv
import hashlib
import logging
import re
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Protocol
from urllib.parse import quote, unquote

from bs4 import BeautifulSoup, Tag

from . import lexicons as lx
from .model import Event, Surface, to_ms

logger = logging.getLogger(__name__)

WCEP_URL = "https://en.wikipedia.org/wiki/Portal:Current_events/{month}_{year}"
PAGEVIEWS_URL = (
    "https://wikimedia.org/api/rest_v1/metrics/pageviews/per-article/"
    "en.wikipedia/all-access/all-agents/{article}/daily/{start}/{end}"
)

# WCEP's ten headings folded into the four buckets shared with Sample B
CATEGORY_GROUPS = {
    "sports": "sports",
    "armed conflicts and attacks": "politics",
    "international relations": "politics",
    "law and crime": "politics",
    "politics and elections": "politics",
    "business and economy": "macro_crypto",
    "science and technology": "macro_crypto",
    "arts and culture": "other",
    "disasters and accidents": "other",
    "health and environment": "other",
}


def regroup_category(wcep_category: str) -> str:
    return CATEGORY_GROUPS.get(wcep_category.strip().lower(), "other")


@dataclass(frozen=True)
class WcepBullet:
    event_date: date
    bullet_text: str
    linked_article: str
    wcep_category: str
    alternates: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.bullet_text.strip():
            raise ValueError("empty bullet text")


@dataclass
class ScrapeResult:
    bullets: list[WcepBullet] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


_DAY_ID = re.compile(r"(\d{4})_([A-Za-z]+)_(\d{1,2})$")


def _day_from_id(day_id: str) -> date:
    m = _DAY_ID.search(day_id or "")
    if not m:
        raise ValueError(f"unrecognised day id {day_id!r}")
    return datetime.strptime(f"{m.group(1)} {m.group(2)} {m.group(3)}", "%Y %B %d").date()


def _article_from_href(href: str) -> str | None:
    if not href or not href.startswith("/wiki/"):
        return None
    title = unquote(href[len("/wiki/"):]).split("#", 1)[0]
    if ":" in title.split("/", 1)[0]:  # Portal:, File:, Category: ...
        return None
    return title.replace("_", " ")


def _own_links(li: Tag) -> list[str]:
    out = []
    for a in li.find_all("a", href=True):
        if a.find_parent("li") is not li:
            continue
        if "external" in (a.get("class") or []):
            continue
        title = _article_from_href(a["href"])
        if title and title not in out:
            out.append(title)
    return out


def _bullet_text(li: Tag) -> str:
    clone = BeautifulSoup(str(li), "html.parser").li
    for a in clone.find_all("a", class_="external"):
        a.decompose()
    for sub in clone.find_all("ul"):
        sub.decompose()
    text = clone.get_text(" ")
    text = re.sub(r"\(\s*\)", "", text)
    text = re.sub(r"\s+", " ", text).strip()
    return re.sub(r"\s+([,.;:!?])", r"\1", text)


def _category_of(li: Tag, content: Tag) -> str:
    for prev in li.find_all_previous(["p", "div"]):
        if prev is content or content not in prev.parents:
            break
        classes = prev.get("class") or []
        if prev.name == "div" and "current-events-content-heading" in classes:
            return prev.get_text(" ", strip=True)
        if prev.name == "p" and prev.find("b") is not None:
            return prev.get_text(" ", strip=True)
    return "Uncategorized"


def parse_wcep_page(markup: str) -> ScrapeResult:
    """All leaf bullets of one month page; malformed days are reported, not raised."""
    result = ScrapeResult()
    soup = BeautifulSoup(markup, "html.parser")
    for day in soup.select("div.current-events-main"):
        day_id = day.get("id", "")
        try:
            event_date = _day_from_id(day_id)
        except ValueError as exc:
            result.errors.append(f"day {day_id or '?'}: {exc}")
            continue
        content = day.select_one("div.current-events-content")
        if content is None:
            result.errors.append(f"day {event_date}: no content block")
            continue
        for li in content.find_all("li"):
            if li.find("ul") is not None:
                continue  # topic node; its children are the bullets
            text = _bullet_text(li)
            if not text:
                continue
            links = _own_links(li)
            if not links:
                parent = li.find_parent("li")
                while parent is not None and not links:
                    links = _own_links(parent)
                    parent = parent.find_parent("li")
            if not links:
                result.errors.append(f"day {event_date}: bullet without article link: {text[:60]!r}")
                continue
            result.bullets.append(WcepBullet(
                event_date=event_date,
                bullet_text=text,
                linked_article=links[0],
                wcep_category=_category_of(li, content),
                alternates=tuple(links[1:]),
            ))
    return result


def month_pages(start: date, end: date) -> list[tuple[int, str]]:
    out = []
    d = date(start.year, start.month, 1)
    while d <= end:
        out.append((d.year, d.strftime("%B")))
        d = date(d.year + (d.month == 12), d.month % 12 + 1, 1)
    return out


class PageSource(Protocol):
    def __call__(self, year: int, month: str) -> str | None: ...


def fixture_pages(directory: Path) -> PageSource:
    directory = Path(directory)

    def load(year: int, month: str) -> str | None:
        path = directory / f"{month}_{year}.html"
        return path.read_text(encoding="utf-8") if path.exists() else None

    return load


def live_pages(get: Callable[[str], str] | None = None) -> PageSource:
    if get is None:
        import requests

        def get(url: str) -> str:
            resp = requests.get(url, timeout=30, headers={"User-Agent": "newsrace/0.1"})
            resp.raise_for_status()
            return resp.text

    def load(year: int, month: str) -> str | None:
        return get(WCEP_URL.format(month=month, year=year))

    return load


def scrape_wcep(window: tuple[date, date], source: PageSource) -> ScrapeResult:
    """Bullets dated inside ``window`` (inclusive), in date then page order."""
    start, end = window
    result = ScrapeResult()
    if end < start:
        return result
    for year, month in month_pages(start, end):
        markup = source(year, month)
        if markup is None:
            result.errors.append(f"missing page {month} {year}")
            continue
        page = parse_wcep_page(markup)
        result.errors.extend(page.errors)
        result.bullets.extend(b for b in page.bullets if start <= b.event_date <= end)
    order = {id(b): i for i, b in enumerate(result.bullets)}
    result.bullets.sort(key=lambda b: (b.event_date, order[id(b)]))
    return result


def us_filter(bullet: WcepBullet, lexicon: Sequence[lx.LexiconTerm] | None = None) -> bool:
    lexicon = lx.us_lexicon() if lexicon is None else lexicon
    text = bullet.bullet_text
    return bool(text) and any(term.occurs_in(text) for term in lexicon)


# --- pageviews ------------------------------------------------------------------


@dataclass(frozen=True)
class PageviewRecord:
    article: str
    day0_views: int
    day1_views: int

    def __post_init__(self):
        if self.day0_views < 0 or self.day1_views < 0:
            raise ValueError("negative pageview count")

    @property
    def total(self) -> int:
        return self.day0_views + self.day1_views


class ArticleNotFound(LookupError):
    pass


class PageviewSource(Protocol):
    def daily(self, article: str, day: date) -> int: ...


class FixturePageviews:
    """``article,date,views`` CSV table; absent rows are zero views."""

    def __init__(self, path: Path):
        self.table: dict[tuple[str, date], int] = {}
        self.articles: set[str] = set()
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                article = row["article"].replace("_", " ")
                self.table[(article, date.fromisoformat(row["date"]))] = int(row["views"])
                self.articles.add(article)

    def daily(self, article: str, day: date) -> int:
        article = article.replace("_", " ")
        if article not in self.articles:
            raise ArticleNotFound(article)
        return self.table.get((article, day), 0)


class RestPageviews:
    """Wikimedia REST per-article daily views (UTC days), with bounded retries."""

    def __init__(self, session=None, retries: int = 3, backoff_s: float = 1.0,
                 sleep: Callable[[float], None] = time.sleep):
        import requests

        self.http = session or requests.Session()
        self.http.headers.setdefault("User-Agent", "newsrace/0.1 (research pipeline)")
        self.retries = retries
        self.backoff_s = backoff_s
        self.sleep = sleep

    def daily(self, article: str, day: date) -> int:
        stamp = day.strftime("%Y%m%d00")
        url = PAGEVIEWS_URL.format(article=quote(article.replace(" ", "_"), safe=""), start=stamp, end=stamp)
        last: Exception | None = None
        for attempt in range(self.retries):
            try:
                resp = self.http.get(url, timeout=30)
            except Exception as exc:
                last = exc
                self.sleep(self.backoff_s * 2**attempt)
                continue
            if resp.status_code == 404:
                raise ArticleNotFound(article)
            if resp.status_code >= 500 or resp.status_code == 429:
                last = RuntimeError(f"pageviews http {resp.status_code}")
                self.sleep(self.backoff_s * 2**attempt)
                continue
            resp.raise_for_status()
            return sum(int(item.get("views", 0)) for item in resp.json().get("items", []))
        raise RuntimeError(f"pageviews for {article} {day}: {last}")


def fetch_pageviews(article: str, event_date: date, client: PageviewSource,
                    warn: Callable[[str], None] | None = None) -> PageviewRecord:
    """Views on the event day and the day after."""
    try:
        day0 = client.daily(article, event_date)
        day1 = client.daily(article, event_date + timedelta(days=1))
    except ArticleNotFound:
        if warn:
            warn(f"no pageviews for article {article!r}; counted as zero")
        return PageviewRecord(article, 0, 0)
    return PageviewRecord(article, day0, day1)


def fetch_all_pageviews(bullets: Sequence[WcepBullet], client: PageviewSource, parallelism: int = 4,
                        warn: Callable[[str], None] | None = None) -> list[PageviewRecord]:
    def one(b: WcepBullet) -> PageviewRecord:
        return fetch_pageviews(b.linked_article, b.event_date, client, warn)

    if parallelism <= 1:
        return [one(b) for b in bullets]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, bullets))


# --- ranking --------------------------------------------------------------------


def wcep_event_id(b: WcepBullet) -> str:
    h = hashlib.sha1(f"{b.event_date}|{b.bullet_text}".encode()).hexdigest()[:8]
    return f"wcep-{b.event_date:%Y%m%d}-{h}"


def bullet_event(b: WcepBullet, views: PageviewRecord) -> Event:
    return Event(
        event_id=wcep_event_id(b),
        surface=Surface.WCEP,
        title=b.linked_article,
        description=b.bullet_text,
        category=regroup_category(b.wcep_category),
        t_e=to_ms(b.event_date),
        attention_prior=views.total,
        source_key=b.linked_article,
        group_key=b.wcep_category,
    )


@dataclass
class RankResult:
    events: list[Event]
    shortfall: int = 0


def rank_and_cap(bullets: Sequence[WcepBullet], pageviews: Sequence[PageviewRecord],
                 per_article_cap: int = 3, top_n: int = 50) -> RankResult:
    """Sort by total views (ties: earlier date, then text), cap per article, take ``top_n``."""
    if len(bullets) != len(pageviews):
        raise ValueError("every bullet needs a pageview record")
    ranked = sorted(zip(bullets, pageviews),
                    key=lambda bv: (-bv[1].total, bv[0].event_date, bv[0].bullet_text))
    per_article: dict[str, int] = {}
    kept = []
    for b, pv in ranked:
        n = per_article.get(b.linked_article, 0)
        if n >= per_article_cap:
            continue
        per_article[b.linked_article] = n + 1
        kept.append(bullet_event(b, pv))
        if len(kept) == top_n:
            break
    return RankResult(kept, max(0, top_n - len(kept)))


@dataclass
class WcepSeedReport:
    candidates: int
    passed_filter: int
    events: list[Event]
    shortfall: int
    errors: list[str]
    warnings: list[str]

    @property
    def distinct_articles(self) -> int:
        return len({e.source_key for e in self.events})


def seed_wcep(window: tuple[date, date], pages: PageSource, pageviews: PageviewSource,
              top_n: int = 50, per_article_cap: int = 3, parallelism: int = 4,
              lexicon: Sequence[lx.LexiconTerm] | None = None) -> WcepSeedReport:
    scraped = scrape_wcep(window, pages)
    passing = [b for b in scraped.bullets if us_filter(b, lexicon)]
    warnings: list[str] = []
    views = fetch_all_pageviews(passing, pageviews, parallelism, warn=warnings.append)
    warnings.sort()  # worker threads append in completion order
    ranked = rank_and_cap(passing, views, per_article_cap, top_n)
    if ranked.shortfall:
        warnings.append(f"only {len(ranked.events)} of {top_n} requested events survived the cap")
    return WcepSeedReport(len(scraped.bullets), len(passing), ranked.events, ranked.shortfall,
                          scraped.errors, warnings)


def iter_window(start: date, end: date) -> Iterable[date]:
    d = start
    while d <= end:
        yield d
        d += timedelta(days=1)
