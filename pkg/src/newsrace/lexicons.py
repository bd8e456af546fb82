"""Word lists and shipped data tables shared by seeding, drafting and verification."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cache
from importlib import resources
from pathlib import Path

_DATA = resources.files("newsrace") / "data"


def data_text(name: str) -> str:
    return (_DATA / name).read_text(encoding="utf-8")


@dataclass(frozen=True)
class LexiconTerm:
    term: str
    exact_case: bool

    def occurs_in(self, text: str) -> bool:
        if self.exact_case:
            return self.term in text
        return self.term.casefold() in text.casefold()


def parse_lexicon(text: str) -> tuple[LexiconTerm, ...]:
    terms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("="):
            terms.append(LexiconTerm(line[1:].strip(), True))
        else:
            # multiword names are case-insensitive; single words keep their case
            terms.append(LexiconTerm(line, " " not in line))
    return tuple(terms)


@cache
def us_lexicon(path: str | None = None) -> tuple[LexiconTerm, ...]:
    text = Path(path).read_text(encoding="utf-8") if path else data_text("us_lexicon.txt")
    return parse_lexicon(text)


@cache
def countries() -> dict[str, str]:
    """Country or region name -> primary language code."""
    return json.loads(data_text("countries.json"))


@cache
def aliases() -> dict[str, list[str]]:
    return json.loads(data_text("aliases.json"))


STOPWORDS = frozenset(
    """a an and are as at be by for from has have he her his in into is it its
    of on or over says said she than that the their them then there these they
    this to under up was were will with would after before during about against
    new also amid while who which what when where why how not no yes""".split()
)

MONTHS = frozenset(
    """january february march april may june july august september october
    november december jan feb mar apr jun jul aug sep sept oct nov dec""".split()
)
WEEKDAYS = frozenset(
    "monday tuesday wednesday thursday friday saturday sunday mon tue wed thu fri sat sun".split()
)

# tokens that state how a prediction market resolves rather than what it is about
OUTCOME_WORDS = frozenset(
    """out in win wins won beat beats lose loses lost remain remains stay stays
    resign resigns leave leaves removed ousted yes no above below over under
    reach reaches hit hits pass passes end ends ended happen happens before
    by elected survive survives advance advances qualify qualifies""".split()
)

# capitalised words that head titles without being names
COMMON_CAPS = frozenset(
    """will the a an in on at by after before during death killing murder
    assassination shooting attack attacks strike strikes election elections
    referendum war crisis protests protest floods flood earthquake storm
    hurricane trial summit final game match draft who what how when is are
    does did can could should game vs v at""".split()
)

CONNECTORS = frozenset("of de del la da di van von al bin el le du der".split())
VERSUS = frozenset({"v", "vs", "v.", "vs."})

TOPIC_WORDS = {
    "sports": ("game", "match", "final", "draft", "score", "season", "tournament",
               "championship", "race", "fight", "playoff", "goal", "semifinal"),
    "politics": ("election", "vote", "strike", "attack", "war", "ceasefire", "protest",
                 "president", "minister", "court", "ruling", "sanctions", "killed", "conflict"),
    "macro_crypto": ("rates", "inflation", "market", "stocks", "bitcoin", "crypto",
                     "tariff", "earnings", "economy", "launch", "trading"),
    "other": ("dies", "died", "death", "flood", "floods", "storm", "earthquake", "fire",
              "album", "tour", "film", "award", "festival", "outbreak"),
}
EVENT_WORDS = frozenset(w for words in TOPIC_WORDS.values() for w in words)

SCHEDULED_WORDS = frozenset(
    """draft election elections vote game match final kickoff summit ceremony
    debate tournament playoff playoffs race fight launch hearing meeting earnings
    release festival awards primary referendum vs v masters semifinal derby""".split()
)
UNSCHEDULED_WORDS = frozenset(
    """dies died death killed kills strike attack shooting earthquake flood floods
    crash fire explosion storm hurricane tornado arrested outbreak collapse
    resigns wildfire bombing""".split()
)
LIVE_WORDS = frozenset(
    """game match final kickoff debate ceremony race fight draft tournament playoff
    playoffs vs v concert speech launch semifinal derby""".split()
)
INSTITUTIONAL_WORDS = frozenset(
    """government ministry court congress senate parliament federal reserve
    pentagon agency commission police department president minister council
    supreme fda fbi nato un eu treasury""".split()
)

WORD_RE = re.compile(r"[^\W_](?:[\w'’.&]*[\w.])?")


def _clean(tok: str) -> str:
    if tok.endswith(".") and tok.count(".") == 1:
        tok = tok[:-1]
    for suffix in ("'s", "’s"):
        if tok.endswith(suffix):
            tok = tok[: -len(suffix)]
    return tok


def words(text: str) -> list[str]:
    """Word tokens; keeps internal periods ("U.S.") and drops a sentence-final one."""
    return [t for t in (_clean(m) for m in WORD_RE.findall(text)) if t]


def word_spans(text: str) -> list[tuple[str, bool, bool]]:
    """Tokens with two flags: punctuation precedes it, and it opens a sentence."""
    out = []
    prev_end = 0
    prev_raw = ""
    for m in WORD_RE.finditer(text):
        gap = text[prev_end:m.start()]
        full_stop = prev_raw.endswith(".") and prev_raw.count(".") == 1
        opens = not prev_raw or full_stop or bool(re.search(r"[.!?;:]", gap))
        broken = opens or bool(gap.strip())
        tok = _clean(m.group())
        if tok:
            out.append((tok, broken, opens))
        prev_end, prev_raw = m.end(), m.group()
    return out


def is_date_token(tok: str) -> bool:
    low = tok.lower().rstrip(".")
    if low in MONTHS or low in WEEKDAYS:
        return True
    return bool(re.fullmatch(r"\d{1,4}(st|nd|rd|th)?|\d{4}-\d{2}-\d{2}|\d{1,2}/\d{1,2}(/\d{2,4})?", low))
