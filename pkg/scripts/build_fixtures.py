#!/usr/bin/env python3
"""Regenerate the packaged mock corpus under src/newsrace/data/fixtures/.

The corpus is synthetic and deterministic. Each seeded event carries a
designed outcome (miss, winning channel, or a paired twitter/news gap),
and the script refuses to write anything until the full pipeline, run
over a scratch copy, reproduces every designed outcome.

    python3 scripts/build_fixtures.py [--out DIR]
"""

from __future__ import annotations

import argparse
import csv
import html
import json
import random
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

from newsrace.drafting import FallbackBackend, draft_booleans
from newsrace.lexicons import EVENT_WORDS
from newsrace.model import MS_PER_MINUTE, Event
from newsrace.pipeline import RunConfig, full_run
from newsrace.seed_polymarket import categorize, seed_polymarket
from newsrace.seed_wcep import FixturePageviews, WcepBullet, fixture_pages, seed_wcep, us_filter
from newsrace.verify import KeywordSet
from newsrace.xrecover import encode_snowflake

ROOT = Path(__file__).resolve().parents[1]
DEFAULT_OUT = ROOT / "src" / "newsrace" / "data" / "fixtures"
UTC = timezone.utc
RNG = random.Random(2026)

CHANNEL = {"fb": "facebook_public", "ig": "instagram_public"}


def ch(name: str) -> str:
    return CHANNEL.get(name, name)


def ms(dt: datetime) -> int:
    return int(dt.replace(tzinfo=UTC).timestamp() * 1000)


def d(s: str) -> date:
    return date.fromisoformat(s)


# --- Sample A design ------------------------------------------------------------
# (article, WCEP heading, day, bullet markup, (views day0, views day1), outcome)
# [[Article|label]] becomes a wiki link; outcome is "miss", "miss:news",
# "miss:x", "win:<channel>" or "pair:<minutes>" (negative: news first).

A = [
    ("2026 NFL draft", "Sports", "2026-04-23",
     "The [[2026 NFL draft]] opens at Acrisure Stadium in Pittsburgh, Pennsylvania.",
     (200000, 236044), "pair:-33.4"),
    ("2026 NBA playoffs", "Sports", "2026-04-18",
     "The [[2026 NBA playoffs]] open with the Oklahoma City Thunder hosting the Memphis Grizzlies.",
     (61000, 58000), "win:bluesky"),
    ("2026 NBA playoffs", "Sports", "2026-05-04",
     "The Denver Nuggets eliminate the Minnesota Timberwolves in the [[2026 NBA playoffs]].",
     (72000, 66000), "win:twitter"),
    ("Boston Marathon", "Sports", "2026-04-20",
     "The 130th [[Boston Marathon]] is run from Hopkinton to Boston, Massachusetts.",
     (88000, 41000), "win:news"),
    ("Kentucky Derby", "Sports", "2026-05-02",
     "The 152nd running of the [[Kentucky Derby]] takes place at Churchill Downs in Louisville, Kentucky.",
     (140000, 95000), "win:fb"),
    ("2026 Iran–United States conflict", "Armed conflicts and attacks", "2026-04-13",
     "[[2026 Iran–United States conflict|Iranian forces]] seize a tanker in the Strait of Hormuz as "
     "the United States Navy moves a carrier group into the Gulf of Oman.",
     (210000, 190000), "win:news"),
    ("2026 Iran–United States conflict", "Armed conflicts and attacks", "2026-04-21",
     "The Pentagon confirms strikes on missile sites near Isfahan in the "
     "[[2026 Iran–United States conflict]].",
     (180000, 160000), "miss"),
    ("2026 Iran–United States conflict", "International relations", "2026-04-28",
     "Oman hosts talks between Iran and the United States in Muscat on a "
     "[[2026 Iran–United States conflict|ceasefire]].",
     (150000, 120000), "win:twitter"),
    ("Donald Trump", "Politics and elections", "2026-04-15",
     "[[Donald Trump]] signs an executive order on federal elections at the White House.",
     (120000, 98000), "win:news"),
    ("Donald Trump", "Politics and elections", "2026-04-30",
     "[[Donald Trump]] addresses the National Rifle Association convention in Houston, Texas.",
     (99000, 87000), "win:fb"),
    ("Donald Trump", "International relations", "2026-05-08",
     "[[Donald Trump]] hosts Saudi Crown Prince Mohammed bin Salman at the White House.",
     (97000, 91000), "win:news"),
    ("Supreme Court of the United States", "Law and crime", "2026-04-14",
     "The [[Supreme Court of the United States|Supreme Court]] hears oral arguments in "
     "Trump v. Illinois over National Guard deployments.",
     (64000, 52000), "win:youtube"),
    ("Supreme Court of the United States", "Law and crime", "2026-04-29",
     "The [[Supreme Court of the United States|U.S. Supreme Court]] rules 6–3 that the president "
     "may remove the chair of the Federal Trade Commission.",
     (70000, 61000), "win:twitter"),
    ("Supreme Court of the United States", "Law and crime", "2026-05-11",
     "The [[Supreme Court of the United States|Supreme Court]] blocks a Texas congressional map "
     "pending appeal.",
     (58000, 50000), "win:news"),
    ("2026 United States Senate elections", "Politics and elections", "2026-04-21",
     "Georgia Governor Brian Kemp declines to enter the race in the "
     "[[2026 United States Senate elections]].",
     (41000, 30000), "win:bluesky"),
    ("2026 United States Senate elections", "Politics and elections", "2026-05-05",
     "Ohio voters choose nominees in the Senate primary for the seat formerly held by JD Vance "
     "([[2026 United States Senate elections]]).",
     (45000, 39000), "win:news"),
    ("Russian invasion of Ukraine", "Armed conflicts and attacks", "2026-04-17",
     "A Russian drone strike on Kharkiv kills 12 people; the United States condemns the attack "
     "([[Russian invasion of Ukraine]]).",
     (52000, 47000), "win:twitter"),
    ("Russian invasion of Ukraine", "International relations", "2026-05-01",
     "Ukrainian and American negotiators meet in Istanbul as part of the "
     "[[Russian invasion of Ukraine|peace process]].",
     (49000, 44000), "win:news"),
    ("2026 Antiguan and Barbudan general election", "Politics and elections", "2026-04-30",
     "Antigua and Barbuda holds a [[2026 Antiguan and Barbudan general election|general election]]; "
     "the United States embassy sends observers.",
     (9000, 8430), "pair:-7.1"),
    ("Gerrymandering in the United States", "Politics and elections", "2026-04-16",
     "A federal court in Missouri strikes down a mid-decade congressional map, reviving debate "
     "over [[Gerrymandering in the United States|gerrymandering]].",
     (2400, 2217), "pair:-10.0"),
    ("Markazi High School strike", "Armed conflicts and attacks", "2026-04-15",
     "A drone strike hits [[Markazi High School strike|Markazi High School]] near the "
     "Pakistan–Afghanistan border, killing nine students; the United States condemns the attack.",
     (15000, 11000), "miss"),
    ("NATO", "International relations", "2026-04-24",
     "[[NATO]] defence ministers meet in Brussels as the United States presses allies on "
     "spending targets.",
     (23000, 19000), "win:fb"),
    ("Federal Bureau of Investigation", "Law and crime", "2026-04-22",
     "The [[Federal Bureau of Investigation|FBI]] arrests a suspect in the firebombing of a "
     "Colorado campaign office.",
     (31000, 22000), "win:news"),
    ("U.S. Immigration and Customs Enforcement", "Law and crime", "2026-04-26",
     "[[U.S. Immigration and Customs Enforcement|ICE]] agents detain 300 workers at a battery "
     "plant in Georgia.",
     (27000, 25000), "miss"),
    ("2026 California gubernatorial election", "Politics and elections", "2026-05-07",
     "Katie Porter and Xavier Becerra meet for a televised debate in Los Angeles ahead of the "
     "[[2026 California gubernatorial election]].",
     (36000, 21000), "win:news"),
    ("China–United States relations", "International relations", "2026-04-25",
     "Chinese Vice Premier He Lifeng and U.S. Treasury Secretary Scott Bessent hold trade talks "
     "in Geneva ([[China–United States relations]]).",
     (21000, 16000), "win:twitter"),
    ("Mexico–United States relations", "International relations", "2026-05-03",
     "Mexican President Claudia Sheinbaum rejects a United States proposal for joint military "
     "operations against cartels ([[Mexico–United States relations]]).",
     (26000, 20000), "win:news"),
    ("Venezuela–United States relations", "International relations", "2026-04-19",
     "The United States Coast Guard intercepts a Venezuelan-flagged vessel in the Caribbean Sea "
     "([[Venezuela–United States relations]]).",
     (18000, 14000), "miss"),
    ("2026 Minneapolis shooting", "Armed conflicts and attacks", "2026-04-27",
     "A gunman opens fire at a church in Minneapolis, Minnesota, killing three people "
     "([[2026 Minneapolis shooting]]).",
     (44000, 38000), "win:bluesky"),
    ("United States Congress", "Politics and elections", "2026-04-29",
     "The [[United States Congress|U.S. House of Representatives]] passes a stopgap spending bill to "
     "avert a government shutdown.",
     (17000, 12000), "win:news"),
    ("Gaza peace plan", "International relations", "2026-05-06",
     "Egypt hosts American and Qatari mediators in Cairo for talks on the [[Gaza peace plan]].",
     (16000, 12500), "miss"),
    ("Cuba–United States relations", "International relations", "2026-04-20",
     "The United States imposes new sanctions on Cuban officials "
     "([[Cuba–United States relations]]).",
     (9800, 7600), "win:fb"),
    ("New York City Police Department", "Law and crime", "2026-05-10",
     "The [[New York City Police Department|NYPD]] arrests two men over a plot targeting a "
     "synagogue in Manhattan, New York City.",
     (12000, 9000), "miss"),
    ("Epstein files", "Law and crime", "2026-04-14",
     "The United States Department of Justice releases additional [[Epstein files]] to Congress.",
     (66000, 54000), "miss"),
    ("Federal Reserve", "Business and economy", "2026-04-29",
     "The [[Federal Reserve]] holds interest rates steady at its April meeting in Washington, D.C.",
     (34000, 26000), "win:news"),
    ("Federal Reserve", "Business and economy", "2026-04-16",
     "[[Federal Reserve]] Chair Jerome Powell warns tariffs could keep inflation elevated, "
     "speaking in Chicago.",
     (28000, 23000), "miss"),
    ("Artemis II", "Science and technology", "2026-04-12",
     "[[Artemis II]] splashes down in the Pacific Ocean off San Diego, California, ending "
     "NASA's crewed lunar flyby.",
     (160000, 110000), "win:news"),
    ("Artemis II", "Science and technology", "2026-04-22",
     "NASA releases the first high-resolution images of the lunar far side taken during "
     "[[Artemis II]].",
     (38000, 29000), "win:youtube"),
    ("Nvidia", "Business and economy", "2026-05-05",
     "[[Nvidia]] becomes the first company to close above a $5 trillion market value on the "
     "Nasdaq in New York.",
     (48000, 35000), "win:twitter"),
    ("Boeing", "Business and economy", "2026-04-23",
     "[[Boeing]] reports a first-quarter loss and says 737 MAX output in Renton, Washington, "
     "will rise.",
     (14000, 9500), "miss"),
    ("Spirit Airlines", "Business and economy", "2026-04-27",
     "[[Spirit Airlines]] files for bankruptcy protection in a New York court for the second time.",
     (19000, 13000), "miss"),
    ("Paramount Skydance", "Business and economy", "2026-05-08",
     "[[Paramount Skydance]] completes its acquisition of Warner Bros. Discovery after approval "
     "by American regulators.",
     (22000, 15000), "miss"),
    ("SpaceX Starship", "Science and technology", "2026-05-09",
     "[[SpaceX Starship|Starship]] completes its first orbital flight after launching from "
     "Starbase, Texas.",
     (56000, 40000), "win:news"),
    ("OpenAI", "Science and technology", "2026-04-16",
     "[[OpenAI]] releases a new reasoning model at an event in San Francisco, California.",
     (51000, 37000), "win:bluesky"),
    ("2025 Central Texas floods", "Disasters and accidents", "2026-04-24",
     "A state inquiry into the [[2025 Central Texas floods]] faults warning delays along the "
     "Guadalupe River in Kerr County, Texas.",
     (5000, 4018), "pair:-11.2"),
    ("Rivas Hernandez", "Arts and culture", "2026-05-01",
     "Singer [[Rivas Hernandez]] dies at 41 in Miami, Florida.",
     (90000, 60383), "pair:-32.0"),
    ("Billy Idol", "Arts and culture", "2026-04-19",
     "[[Billy Idol]] announces a farewell tour with a concert at Madison Square Garden in "
     "New York City.",
     (26000, 20326), "pair:-53.7"),
    ("Met Gala", "Arts and culture", "2026-05-04",
     "The [[Met Gala]] is held at the Metropolitan Museum of Art in New York City.",
     (83000, 61000), "win:fb"),
    ("2026 Texas measles outbreak", "Health and environment", "2026-04-17",
     "The Texas Department of State Health Services reports 40 new cases in the "
     "[[2026 Texas measles outbreak]].",
     (8800, 6100), "miss"),
    ("Tornado outbreak of April 27–28, 2026", "Disasters and accidents", "2026-04-28",
     "A tornado outbreak kills 11 people across Oklahoma and Arkansas "
     "([[Tornado outbreak of April 27–28, 2026]]).",
     (24000, 17000), "win:forum"),
]

# same article as the Iran bullets above; ranked in the top 50 but dropped by the cap
A_CAPPED = [
    ("2026 Iran–United States conflict", "Armed conflicts and attacks", "2026-05-06",
     "Iranian fast boats harass a United States destroyer in the "
     "[[2026 Iran–United States conflict|Persian Gulf]].", (100000, 90000)),
    ("2026 Iran–United States conflict", "International relations", "2026-05-09",
     "The United States extends the truce with Iran by thirty days "
     "([[2026 Iran–United States conflict]]).", (90000, 85000)),
]

WCEP_HEADINGS = [
    "Armed conflicts and attacks", "Arts and culture", "Business and economy",
    "Disasters and accidents", "Health and environment", "International relations",
    "Law and crime", "Politics and elections", "Science and technology", "Sports",
]

US_PLACES = [
    ("Tucson", "Arizona"), ("Sacramento", "California"), ("Fresno", "California"),
    ("Boulder", "Colorado"), ("Hartford", "Connecticut"), ("Tampa", "Florida"),
    ("Savannah", "Georgia"), ("Boise", "Idaho"), ("Springfield", "Illinois"),
    ("Gary", "Indiana"), ("Des Moines", "Iowa"), ("Wichita", "Kansas"),
    ("Lexington", "Kentucky"), ("Baton Rouge", "Louisiana"), ("Portland", "Maine"),
    ("Annapolis", "Maryland"), ("Worcester", "Massachusetts"), ("Flint", "Michigan"),
    ("Duluth", "Minnesota"), ("Jackson", "Mississippi"), ("St. Louis", "Missouri"),
    ("Billings", "Montana"), ("Omaha", "Nebraska"), ("Reno", "Nevada"),
    ("Newark", "New Jersey"), ("Albuquerque", "New Mexico"), ("Buffalo", "New York"),
    ("Raleigh", "North Carolina"), ("Fargo", "North Dakota"), ("Toledo", "Ohio"),
    ("Tulsa", "Oklahoma"), ("Eugene", "Oregon"), ("Erie", "Pennsylvania"),
    ("Providence", "Rhode Island"), ("Charleston", "South Carolina"),
    ("Sioux Falls", "South Dakota"), ("Memphis", "Tennessee"), ("El Paso", "Texas"),
    ("Provo", "Utah"), ("Burlington", "Vermont"), ("Norfolk", "Virginia"),
    ("Spokane", "Washington"), ("Morgantown", "West Virginia"), ("Madison", "Wisconsin"),
    ("Casper", "Wyoming"), ("Anchorage", "Alaska"), ("Honolulu", "Hawaii"),
]

US_TEMPLATES = [
    ("{heading}", "A water main break floods downtown {city}, {state}, closing schools for two days.",
     "{city}, {state}"),
    ("{heading}", "The mayor of {city}, {state}, declares a local emergency after a chemical spill.",
     "{city}, {state}"),
    ("{heading}", "A {state} jury convicts a former county official of bribery.",
     "Politics of {state}"),
    ("{heading}", "The {state} legislature passes a bill limiting cellphone use in schools.",
     "{state} Legislature"),
    ("{heading}", "A wildfire near {city}, {state}, forces the evacuation of 2,000 residents.",
     "{city} wildfire"),
    ("{heading}", "Voters in {city}, {state}, approve a transit tax in a special election.",
     "{city} transit referendum"),
    ("{heading}", "A freight train derails near {city}, {state}; no injuries are reported.",
     "{city} train derailment"),
    ("{heading}", "{state} health officials report the first West Nile virus case of the year.",
     "West Nile virus in the United States"),
    ("{heading}", "A university in {city}, {state}, announces a new research reactor.",
     "{city}"),
    ("{heading}", "Severe storms knock out power to 80,000 customers across {state}.",
     "{state} storms"),
]

FOREIGN = [
    ("Nigeria", "Lagos", "Nigerian"), ("Kenya", "Nairobi", "Kenyan"), ("Brazil", "Brasília", "Brazilian"),
    ("Argentina", "Buenos Aires", "Argentine"), ("Chile", "Santiago", "Chilean"),
    ("Peru", "Lima", "Peruvian"), ("India", "New Delhi", "Indian"), ("Japan", "Tokyo", "Japanese"),
    ("South Korea", "Seoul", "South Korean"), ("Indonesia", "Jakarta", "Indonesian"),
    ("Philippines", "Manila", "Philippine"), ("Thailand", "Bangkok", "Thai"),
    ("Vietnam", "Hanoi", "Vietnamese"), ("Australia", "Canberra", "Australian"),
    ("New Zealand", "Wellington", "New Zealand"), ("France", "Paris", "French"),
    ("Germany", "Berlin", "German"), ("Italy", "Rome", "Italian"), ("Spain", "Madrid", "Spanish"),
    ("Poland", "Warsaw", "Polish"), ("Romania", "Bucharest", "Romanian"),
    ("Turkey", "Ankara", "Turkish"), ("Egypt", "Cairo", "Egyptian"),
    ("South Africa", "Pretoria", "South African"), ("Ethiopia", "Addis Ababa", "Ethiopian"),
    ("Sudan", "Khartoum", "Sudanese"), ("Bangladesh", "Dhaka", "Bangladeshi"),
    ("Nepal", "Kathmandu", "Nepali"), ("Sri Lanka", "Colombo", "Sri Lankan"),
    ("Canada", "Ottawa", "Canadian"), ("Colombia", "Bogotá", "Colombian"),
    ("Ecuador", "Quito", "Ecuadorian"), ("Bolivia", "La Paz", "Bolivian"),
    ("Norway", "Oslo", "Norwegian"), ("Sweden", "Stockholm", "Swedish"),
    ("Finland", "Helsinki", "Finnish"), ("Greece", "Athens", "Greek"),
    ("Portugal", "Lisbon", "Portuguese"), ("Hungary", "Budapest", "Hungarian"),
    ("Serbia", "Belgrade", "Serbian"), ("Morocco", "Rabat", "Moroccan"),
    ("Ghana", "Accra", "Ghanaian"), ("Senegal", "Dakar", "Senegalese"),
    ("Malaysia", "Kuala Lumpur", "Malaysian"), ("Mongolia", "Ulaanbaatar", "Mongolian"),
]

FOREIGN_TEMPLATES = [
    ("Politics and elections", "The {adj} parliament elects a new speaker in {capital}.",
     "Parliament of {country}"),
    ("Disasters and accidents", "Flooding in {country} kills at least {n} people and displaces thousands.",
     "{year} {country} floods"),
    ("Business and economy", "The central bank of {country} raises its key rate by 50 basis points.",
     "Economy of {country}"),
    ("Armed conflicts and attacks", "A bomb attack on a market in {country} kills {n} people.",
     "Terrorism in {country}"),
    ("Law and crime", "A court in {capital} sentences a former {adj} minister to {n} years in prison.",
     "Corruption in {country}"),
    ("Sports", "{country} win the regional rugby championship final in {capital}.",
     "Rugby union in {country}"),
    ("Health and environment", "{country} declares an outbreak of cholera in three provinces.",
     "{year} {country} cholera outbreak"),
    ("Science and technology", "{country} launches its first domestically built satellite.",
     "Space program of {country}"),
    ("Arts and culture", "The {adj} film festival opens in {capital} with a record {n} entries.",
     "Cinema of {country}"),
    ("International relations", "The foreign ministers of {country} and {other} sign a border accord "
     "in {capital}.", "{country}–{other} relations"),
    ("Disasters and accidents", "A magnitude {mag} earthquake strikes {country}, damaging homes near "
     "{capital}.", "{year} {country} earthquake"),
    ("Politics and elections", "Thousands protest in {capital} against a proposed pension reform.",
     "{year} {adj} protests"),
]


def link(article: str, label: str | None = None) -> str:
    href = "/wiki/" + article.replace(" ", "_")
    return f'<a href="{html.escape(href)}" title="{html.escape(article)}">{html.escape(label or article)}</a>'


def render_markup(markup: str) -> str:
    """[[Article|label]] to an anchor; everything else escaped."""
    out, rest = [], markup
    while "[[" in rest:
        pre, _, tail = rest.partition("[[")
        inner, _, rest = tail.partition("]]")
        article, _, label = inner.partition("|")
        out.append(html.escape(pre))
        out.append(link(article, label or None))
    out.append(html.escape(rest))
    return "".join(out)


def plain_text(markup: str) -> str:
    out, rest = [], markup
    while "[[" in rest:
        pre, _, tail = rest.partition("[[")
        inner, _, rest = tail.partition("]]")
        out += [pre, inner.rpartition("|")[2]]
    return "".join(out + [rest])


SOURCES = ["AP", "Reuters", "BBC News", "NPR", "Al Jazeera", "The Guardian", "CNN", "France 24"]


def cite(i: int) -> str:
    src = SOURCES[i % len(SOURCES)]
    return f' <a class="external text" href="https://news.example.org/{i}" rel="nofollow">({html.escape(src)})</a>'


@dataclass
class Bullet:
    day: date
    heading: str
    markup: str  # already rendered html
    article: str
    views: tuple[int, int] | None
    key: str | None = None  # Sample A design key when selected


def us_fillers(n: int, days: list[date]) -> list[Bullet]:
    out = []
    for i in range(n):
        city, state = US_PLACES[i % len(US_PLACES)]
        _, text, art = US_TEMPLATES[(i * 7) % len(US_TEMPLATES)]
        article = art.format(city=city, state=state)
        text = text.format(city=city, state=state)
        heading = WCEP_HEADINGS[(i * 3) % len(WCEP_HEADINGS)]
        views = None if i % 17 == 5 else (RNG.randint(200, 2300), RNG.randint(100, 1700))
        body = render_markup(text.replace(f"{city}, {state}", f"[[{article}|{city}, {state}]]", 1)
                             if f"{city}, {state}" in text else f"{text} ([[{article}]])")
        out.append(Bullet(days[i % len(days)], heading, body, article, views))
    return out


def foreign_bullets(n: int, days: list[date]) -> list[Bullet]:
    out = []
    for i in range(n):
        country, capital, adj = FOREIGN[i % len(FOREIGN)]
        other = FOREIGN[(i * 11 + 3) % len(FOREIGN)][0]
        if other == country:
            other = FOREIGN[(i + 1) % len(FOREIGN)][0]
        heading, text, art = FOREIGN_TEMPLATES[(i * 5) % len(FOREIGN_TEMPLATES)]
        fmt = dict(country=country, capital=capital, adj=adj, other=other, year=2026,
                   n=RNG.randint(3, 40), mag=f"{RNG.uniform(5.0, 7.4):.1f}")
        article = art.format(**fmt)
        body = render_markup(f"{text.format(**fmt)} ([[{article}]])")
        out.append(Bullet(days[i % len(days)], heading, body, article,
                          (RNG.randint(500, 60000), RNG.randint(500, 40000))))
    return out


def day_id(dd: date) -> str:
    return f"{dd.year}_{dd.strftime('%B')}_{dd.day}"


def render_month(year: int, month: int, bullets: list[Bullet], broken_day: date | None) -> str:
    by_day: dict[date, list[Bullet]] = {}
    for b in bullets:
        if b.day.month == month:
            by_day.setdefault(b.day, []).append(b)
    name = date(year, month, 1).strftime("%B")
    parts = [f"<!DOCTYPE html><html><head><title>Portal:Current events/{name} {year}</title></head>",
             '<body><div id="mw-content-text"><div class="mw-parser-output">']
    cite_i = month * 1000
    for dd in sorted(by_day):
        ident = day_id(dd)
        if dd == broken_day:
            ident = f"{year}_{name}_"  # truncated id, exercises the error path
        parts.append(f'<div class="current-events-main vevent" id="{ident}">')
        parts.append(f'<div class="current-events-heading plainlinks"><span class="summary">'
                     f'{dd.strftime("%B")} {dd.day}, {dd.year} ({dd.strftime("%A")})</span></div>')
        parts.append('<div class="current-events-content description">')
        grouped: dict[str, list[Bullet]] = {}
        for b in by_day[dd]:
            grouped.setdefault(b.heading, []).append(b)
        for j, heading in enumerate(sorted(grouped)):
            # both heading styles occur on the live portal
            if j % 2:
                parts.append(f'<div class="current-events-content-heading" role="heading">{heading}</div>')
            else:
                parts.append(f"<p><b>{heading}</b></p>")
            parts.append("<ul>")
            items = grouped[heading]
            # group the first two bullets of a heading under a topic node sometimes
            if len(items) >= 3 and j % 3 == 0:
                topic = items[0]
                parts.append(f"<li>{link(topic.article)}<ul>")
                for b in items[:2]:
                    cite_i += 1
                    plain = b.markup if b is not topic else b.markup
                    parts.append(f"<li>{plain}{cite(cite_i)}</li>")
                parts.append("</ul></li>")
                items = items[2:]
            for b in items:
                cite_i += 1
                parts.append(f"<li>{b.markup}{cite(cite_i)}</li>")
            parts.append("</ul>")
        parts.append("</div></div>")
    parts.append("</div></div></body></html>")
    return "\n".join(parts)


def build_wcep(out: Path) -> dict[tuple[str, date], str]:
    """Writes the two month pages and pageviews.csv; returns (article, day) -> design key."""
    window = [d("2026-04-12") + timedelta(days=i) for i in range(30)]
    bullets: list[Bullet] = []
    keys: dict[tuple[str, date], str] = {}
    for i, (article, heading, day, markup, views, _) in enumerate(A):
        key = f"A{i + 1:02d}"
        bullets.append(Bullet(d(day), heading, render_markup(markup), article, views, key))
        keys[(article, d(day))] = key
    for b in bullets:
        assert us_filter(WcepBullet(b.day, plain_text(A[int(b.key[1:]) - 1][3]), b.article, b.heading)), b.key
    for article, heading, day, markup, views in A_CAPPED:
        bullets.append(Bullet(d(day), heading, render_markup(markup), article, views))
    bullets += us_fillers(171 - len(A) - len(A_CAPPED), window)
    bullets += foreign_bullets(586 - 171, window)
    # out-of-window days on the same month pages
    outside = [d(f"2026-04-0{k}") for k in (3, 6, 9)] + [d(f"2026-05-{k}") for k in (13, 20, 27)]
    extra = us_fillers(12, outside) + foreign_bullets(24, outside)
    for b in extra:
        b.views = (250000, 250000)  # would dominate the ranking if the window leaked
    bullets += extra
    RNG.shuffle(bullets)

    (out / "wcep").mkdir(parents=True, exist_ok=True)
    for month in (4, 5):
        page = render_month(2026, month, bullets, d("2026-05-27") if month == 5 else None)
        (out / "wcep" / f"{date(2026, month, 1).strftime('%B')}_2026.html").write_text(page, encoding="utf-8")

    rows: dict[tuple[str, date], int] = {}
    for b in bullets:
        if b.views is None:
            continue
        for k, v in enumerate(b.views):
            rows[(b.article, b.day + timedelta(days=k))] = v
    with open(out / "pageviews.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["article", "date", "views"])
        for (art, day), v in sorted(rows.items()):
            w.writerow([art, day.isoformat(), v])
    return keys


# --- Sample B design -------------------------------------------------------------

@dataclass
class Market:
    title: str
    question: str
    outcome: str
    when: datetime | None = None  # spike time; None for markets without in-window trades
    slug: str = ""
    volume: float = 0.0
    market_id: str = ""
    binary: bool = True
    start: datetime | None = None
    end: datetime | None = None
    key: str = ""


def game_q(a: str, b: str, day: str, soccer: bool = False) -> str:
    if soccer:
        return f"Will {a} win against {b} on {day}?"
    return f"Will the {a} beat the {b} on {day}?"


PAIRED_B = [
    ("Iran-US conflict ends by March 31?",
     "Will the conflict between Iran and the United States end by March 31, 2026?",
     "2026-03-09T14:07:00", -34.23),
    ("UFC Fight Night: Strickland vs. Hernandez",
     "Will Sean Strickland beat Anthony Hernandez at UFC Fight Night?", "2026-02-22T04:41:00", -0.62),
    ("Axiom insider trading charges?",
     "Will Axiom executives be charged with insider trading by April 30?", "2026-04-02T15:30:00", -0.50),
    ("Mavericks vs. Lakers", game_q("Mavericks", "Lakers", "2026-03-02"), "2026-03-03T03:12:00", -0.26),
    ("Hungary election: Jobbik above 5%?",
     "Will Jobbik win at least 5% in the Hungarian parliamentary election?", "2026-04-12T19:00:00", -0.20),
    ("Nuggets vs. Thunder", game_q("Nuggets", "Thunder", "2026-03-20"), "2026-03-21T04:05:00", -0.10),
    ("Real Madrid vs. Benfica", game_q("Real Madrid", "Benfica", "2026-02-25", True),
     "2026-02-25T21:51:00", -0.06),
    ("FC Barcelona vs. Newcastle", game_q("FC Barcelona", "Newcastle", "2026-03-18", True),
     "2026-03-18T21:49:00", -0.02),
    ("Aston Villa vs. Wolves", game_q("Aston Villa", "Wolves", "2026-02-27", True),
     "2026-02-27T21:52:00", -0.02),
    ("Spurs vs. Pistons", game_q("Spurs", "Pistons", "2026-03-11"), "2026-03-12T02:36:00", -0.02),
    ("Thunder vs. Pistons", game_q("Thunder", "Pistons", "2026-02-23"), "2026-02-24T02:44:00", 1.20),
    ("UCLA vs. UConn", game_q("UCLA", "UConn", "2026-03-28"), "2026-03-28T23:58:00", 1.26),
    ("Olympique Lyonnais vs. Nantes", game_q("Olympique Lyonnais", "Nantes", "2026-02-15", True),
     "2026-02-15T21:47:00", 2.50),
    ("Schauffele wins the 2026 Masters?", "Will Xander Schauffele win the 2026 Masters Tournament?",
     "2026-04-12T22:31:00", 14.19),
    ("G2 Esports vs. Bilibili Gaming (LoL)",
     "Will G2 Esports beat Bilibili Gaming in the League of Legends semifinal?",
     "2026-05-03T11:20:00", 143.80),
    ("Atlético Madrid vs. Real Betis", game_q("Atlético Madrid", "Real Betis", "2026-02-14", True),
     "2026-02-14T19:10:00", 552.17),
]

NBA = ["Celtics/Knicks", "Warriors/Suns", "Bucks/Heat", "Cavaliers/Magic", "Rockets/Grizzlies",
       "Timberwolves/Clippers", "Hawks/Pacers", "Bulls/Raptors", "Kings/Jazz", "Nets/Hornets",
       "76ers/Wizards", "Pelicans/Trail Blazers", "Lakers/Warriors", "Knicks/Cavaliers",
       "Celtics/Bucks", "Suns/Kings", "Heat/Hawks", "Magic/Bulls", "Grizzlies/Pelicans",
       "Clippers/Rockets"]
SOCCER = ["Arsenal/Chelsea", "Liverpool/Manchester City", "Tottenham/Everton",
          "Bayern Munich/Borussia Dortmund", "Inter Milan/Juventus", "AC Milan/Napoli",
          "Paris Saint-Germain/Marseille", "Porto/Sporting CP", "Ajax/PSV Eindhoven",
          "Sevilla/Valencia", "Roma/Lazio", "Celtic/Rangers", "Brighton/Fulham",
          "Bayer Leverkusen/Stuttgart", "Monaco/Lille", "Braga/Benfica",
          "Fenerbahce/Galatasaray", "Feyenoord/AZ Alkmaar"]
NHL = ["Bruins/Maple Leafs", "Oilers/Avalanche", "Panthers/Lightning", "Stars/Jets",
       "Devils/Islanders", "Canadiens/Senators"]
MLB = ["Yankees/Red Sox", "Dodgers/Padres", "Mets/Braves", "Cubs/Cardinals"]
SINGLES = [("UFC 326: Pereira vs. Ankalaev", "Will Alex Pereira beat Magomed Ankalaev at UFC 326?"),
           ("UFC 327: Makhachev vs. Della Maddalena",
            "Will Islam Makhachev beat Jack Della Maddalena at UFC 327?"),
           ("Indian Wells: Sinner vs. Alcaraz", "Will Jannik Sinner beat Carlos Alcaraz in the Indian Wells final?"),
           ("Miami Open: Sabalenka vs. Swiatek", "Will Aryna Sabalenka beat Iga Swiatek in the Miami Open final?"),
           ("T1 vs. Hanwha Life Esports", "Will T1 beat Hanwha Life Esports in the LCK final?")]

POLITICS_HITS = [
    ("Tisza or Fidesz: Hungary election winner",
     "Will the Tisza party win the most seats in the Hungarian parliamentary election?", "2026-04-12T20:40:00"),
    ("Peru election: Fujimori advances to runoff?",
     "Will Keiko Fujimori advance to the runoff of the Peruvian presidential election?", "2026-04-13T03:15:00"),
    ("Texas Senate primary winner (Democratic)",
     "Will James Talarico win the Democratic primary for the Texas Senate seat?", "2026-03-04T02:20:00"),
    ("Israel strikes Iran by March 31?", "Will Israel carry out a military strike on Iran by March 31?",
     "2026-03-26T05:50:00"),
    ("US strikes on Venezuela by February 28?",
     "Will the US military strike targets inside Venezuela by February 28?", "2026-02-19T11:05:00"),
    ("Trump tariffs on EU by April 1?",
     "Will Donald Trump impose new tariffs on the European Union by April 1?", "2026-03-30T18:45:00"),
    ("Supreme Court rules on Trump tariffs by March 1?",
     "Will the Supreme Court strike down the IEEPA tariffs by March 1?", "2026-02-20T15:02:00"),
    ("Denmark snap election called by March 31?",
     "Will Mette Frederiksen call a snap election in Denmark by March 31?", "2026-03-10T12:30:00"),
    ("Portugal presidential election winner",
     "Will Antonio Jose Seguro win the Portuguese presidential election?", "2026-02-15T21:10:00"),
]
POLITICS_MISSES = [
    ("Khamenei out by February 28?", "Will Ali Khamenei cease to be Supreme Leader of Iran by February 28?"),
    ("Netanyahu out by March 31?", "Will Benjamin Netanyahu leave office by March 31?"),
    ("Putin out by April 30?", "Will Vladimir Putin leave office by April 30?"),
    ("Zelensky out by April 30?", "Will Volodymyr Zelensky leave office by April 30?"),
    ("Russia x Ukraine ceasefire by March 31?", "Will Russia and Ukraine agree a ceasefire by March 31?"),
    ("China invades Taiwan by April 30?", "Will China invade Taiwan by April 30?"),
    ("Starmer out by April 30?", "Will Keir Starmer leave office by April 30?"),
    ("Macron resigns by March 31?", "Will Emmanuel Macron resign by March 31?"),
    ("US government shutdown by March 14?", "Will Congress fail to fund the federal government by March 14?"),
    ("Trump approval above 45% on April 1?", "Will Gallup report Trump approval above 45% on April 1?"),
    ("Erdogan out by May 1?", "Will Recep Tayyip Erdogan leave office by May 1?"),
    ("North Korea missile test by March 31?", "Will North Korea test an ICBM by March 31?"),
    ("Iran nuclear deal by April 30?", "Will Iran and the IAEA sign a nuclear agreement by April 30?"),
    ("Hamas disarmament deal by March 1?", "Will Hamas sign a disarmament agreement by March 1?"),
    ("Trump acquires Greenland by April 30?", "Will Donald Trump announce a Greenland purchase by April 30?"),
    ("Ukraine election called by May 1?", "Will Ukraine schedule a presidential election by May 1?"),
    ("Modi out by May 1?", "Will Narendra Modi leave office by May 1?"),
]
MACRO_HITS = [
    ("Fed decision in March?", "Will the Fed cut rates by 25 bps at the March meeting?", "2026-03-18T18:00:00"),
    ("Bitcoin above $100,000 on March 31?", "Will Bitcoin close above $100,000 on Binance on March 31?",
     "2026-03-31T23:40:00"),
    ("March CPI above 3%?", "Will the BLS report March CPI inflation above 3%?", "2026-04-10T12:30:00"),
    ("WTI crude oil above $80 by April 30?", "Will WTI crude oil trade above $80 by April 30?",
     "2026-04-06T13:55:00"),
]
MACRO_MISSES = [
    ("ECB rate cut in March?", "Will the ECB cut its deposit rate in March?"),
    ("Ethereum above $4,000 on March 31?", "Will Ethereum close above $4,000 on March 31?"),
    ("Solana above $300 on March 31?", "Will Solana close above $300 on March 31?"),
    ("Nasdaq 100 up in March?", "Will the Nasdaq 100 close March higher than it opened?"),
    ("Tesla stock above $500 on March 31?", "Will Tesla shares close above $500 on March 31?"),
]
OTHER_HIT = ("Oscars 2026: Best Picture winner", "Will Sinners win Best Picture at the Oscars?",
             "2026-03-16T03:55:00")
OTHER_MISSES = [
    ("Eurovision 2026 winner", "Will Finland win Eurovision 2026?"),
    ("GTA VI delayed again?", "Will Rockstar Games delay GTA VI again before May 1?"),
    ("Apple foldable iPhone announced by April 30?", "Will Apple announce a foldable iPhone by April 30?"),
    ("Kendrick Lamar tops the Billboard Hot 100?",
     "Will Kendrick Lamar have the number one song on the Billboard Hot 100 on March 7?"),
]
DROPPED = [  # pass the filters but trade only before the scan window
    ("Super Bowl LX winner", "Will the Seattle Seahawks win Super Bowl LX?"),
    ("Australian Open men's champion", "Will Jannik Sinner win the Australian Open?"),
    ("Golden Globes: Best Drama", "Will Hamnet win Best Motion Picture - Drama?"),
    ("Fed decision in January?", "Will the Fed hold rates in January?"),
    ("Costa Rica presidential election winner", "Will Laura Fernandez win the Costa Rican election?"),
    ("Japan snap election: LDP majority?", "Will the LDP win a majority in the lower house?"),
    ("Bitcoin above $120,000 on January 31?", "Will Bitcoin close above $120,000 on January 31?"),
    ("Grammys: Album of the Year", "Will Bad Bunny win Album of the Year?"),
    ("Thailand election winner", "Will the People's Party win the most seats?"),
    ("Seahawks vs. Patriots", "Will the Seahawks beat the Patriots on 2026-02-08?"),
    ("Trump attends Davos?", "Will Donald Trump attend the Davos meeting?"),
    ("Government shutdown by January 30?", "Will the US government shut down by January 30?"),
    ("Bangladesh election winner", "Will the BNP win the most seats in Bangladesh?"),
    ("Kalshi vs. CFTC ruling?", "Will the court rule for Kalshi by February 10?"),
    ("Milan Cortina: Norway most golds?", "Will Norway win the most gold medals at Milan Cortina?"),
    ("Maduro in custody by January 31?", "Will Nicolas Maduro be in US custody by January 31?"),
    ("Ethereum above $3,500 on February 1?", "Will Ethereum close above $3,500 on February 1?"),
    ("Colts head coach fired?", "Will the Colts fire their head coach by February 1?"),
    ("NFC Championship: Rams vs. Seahawks", "Will the Rams beat the Seahawks on 2026-01-25?"),
    ("January jobs report above 100k?", "Will nonfarm payrolls rise by more than 100,000?"),
    ("TikTok US deal closed by January 31?", "Will the TikTok US joint venture close by January 31?"),
]


def _spread(rng: random.Random, n: int, start: str, end: str) -> list[datetime]:
    a, b = datetime.fromisoformat(start), datetime.fromisoformat(end)
    span = int((b - a).total_seconds() // 60)
    return sorted(a + timedelta(minutes=rng.randrange(span)) for _ in range(n))


def design_b() -> tuple[list[Market], list[Market]]:
    """Returns (markets that become events, everything else that must be filtered)."""
    rng = random.Random(17)
    events: list[Market] = []
    for title, q, when, delta in PAIRED_B:
        events.append(Market(title, q, f"pair:{delta}", datetime.fromisoformat(when)))

    # Ordinary games are kept away from the WCEP window so the two samples never share
    # mentions; hits and misses alternate.
    games = []
    for pair in NBA:
        a, b = pair.split("/")
        games.append((f"{a} vs. {b}", a, b, False))
    for pair in SOCCER:
        a, b = pair.split("/")
        games.append((f"{a} vs. {b}", a, b, True))
    for pair in NHL + MLB:
        a, b = pair.split("/")
        games.append((f"{a} vs. {b}", a, b, False))
    times = _spread(rng, len(games) + len(SINGLES), "2026-02-14T00:00:00", "2026-04-08T00:00:00")
    rng.shuffle(times)
    for i, (title, a, b, soccer) in enumerate(games):
        t = times[i]
        events.append(Market(title, game_q(a, b, t.date().isoformat(), soccer), "hit" if i % 2 == 0 else "miss", t))
    for j, (title, q) in enumerate(SINGLES):
        t = times[len(games) + j]
        events.append(Market(title, q, "hit" if j < 2 else "miss", t))

    for title, q, when in POLITICS_HITS:
        events.append(Market(title, q, "hit", datetime.fromisoformat(when)))
    # a few misses are pulled but fail verification
    polluted = {POLITICS_MISSES[0][0]: "miss:news", POLITICS_MISSES[1][0]: "miss:x",
                MACRO_MISSES[0][0]: "miss:x"}
    for (title, q), t in zip(POLITICS_MISSES, _spread(rng, len(POLITICS_MISSES), "2026-02-14", "2026-04-05")):
        events.append(Market(title, q, polluted.get(title, "miss"), t))
    for title, q, when in MACRO_HITS:
        events.append(Market(title, q, "hit", datetime.fromisoformat(when)))
    for (title, q), t in zip(MACRO_MISSES, _spread(rng, len(MACRO_MISSES), "2026-02-14", "2026-04-05")):
        events.append(Market(title, q, polluted.get(title, "miss"), t))
    title, q, when = OTHER_HIT
    events.append(Market(title, q, "hit", datetime.fromisoformat(when)))
    for (title, q), t in zip(OTHER_MISSES, _spread(rng, len(OTHER_MISSES), "2026-02-14", "2026-04-05")):
        events.append(Market(title, q, "miss", t))

    # winners for the plain hits, per the designed channel totals
    pool = (["twitter"] * 15 + ["news"] * 5 + ["bluesky"] * 9 + ["fb"] * 4 + ["youtube"] * 3
            + ["ig"] * 2 + ["forum"] + ["reddit"])
    hits = [m for m in events if m.outcome == "hit"]
    assert len(hits) == len(pool), (len(hits), len(pool))
    rng.shuffle(pool)
    for m, w in zip(hits, pool):
        m.outcome = f"win:{w}"

    # slugs: sports markets share an event slug in twos, everything else has its own
    sports = [m for m in events if categorize(m.title) == "sports"]
    for i, m in enumerate(sports):
        m.slug = f"sports-card-{i // 2 + 1:02d}"
    for m in events:
        if not m.slug:
            m.slug = "-".join(w for w in "".join(c if c.isalnum() else " " for c in m.title.lower()).split())

    # volumes: log-spaced, median pinned
    n = len(events)
    hi, lo, mid = 95_000_000, 110_000, 6_100_000
    vols = []
    for i in range(n):
        if i <= n // 2:
            v = hi * (mid / hi) ** (i / (n // 2))
        else:
            v = mid * (lo / mid) ** ((i - n // 2) / (n - 1 - n // 2))
        vols.append(round(v, 2))
    vols[n // 2] = float(mid)
    order = list(range(n))
    rng.shuffle(order)
    for rank, idx in enumerate(order):
        events[idx].volume = vols[rank]

    others: list[Market] = []
    for title, q in DROPPED:
        m = Market(title, q, "dropped", None, slug=title.lower().replace(" ", "-"),
                   volume=round(rng.uniform(150_000, 40_000_000), 2))
        m.start, m.end = datetime(2026, 1, 2), datetime(2026, 2, 20)
        others.append(m)

    filler = [  # rejected by a filter rule, or ranked past the top-k cut
        Market("Who will win the 2026 NBA MVP?", "Multi-outcome MVP market", "nonbinary", None,
               volume=41_000_000.0, binary=False),
        Market("Next Fed chair", "Multi-outcome nomination market", "nonbinary", None,
               volume=22_000_000.0, binary=False),
        Market("2026 Oscars: every category", "Multi-outcome awards market", "nonbinary", None,
               volume=3_000_000.0, binary=False),
        Market("Fed decision in December?", "Will the Fed cut in December 2025?", "expired", None,
               volume=60_000_000.0),
        Market("Bitcoin above $90,000 on January 1?", "Will Bitcoin close above $90,000 on January 1?",
               "expired", None, volume=18_000_000.0),
        Market("Who will Trump pardon in 2025?", "Will Trump pardon anyone in 2025?", "expired", None,
               volume=7_000_000.0),
        Market("Lithuania vs. Latvia", "Will Lithuania beat Latvia?", "floor", None, volume=99_999.99),
        Market("Croatia vs. Slovenia", "Will Croatia beat Slovenia?", "floor", None, volume=42_000.00),
        Market("Best ice cream flavor poll?", "Will vanilla top the poll?", "floor", None, volume=1_250.00),
        Market("Moldova election turnout above 50%?", "Will turnout exceed 50%?", "floor", None,
               volume=88_000.00),
        Market("Curling world championship winner", "Will Scotland win?", "cut", None, volume=100_000.00),
        Market("Kabaddi league final", "Will Patna win the final?", "cut", None, volume=101_500.00),
        Market("Iceland weather record by April?", "Will Reykjavik set a heat record?", "cut", None,
               volume=104_999.99),
    ]
    for m in filler:
        m.slug = m.slug or m.title.lower().replace(" ", "-")
        if m.outcome == "expired":
            m.start, m.end = datetime(2025, 11, 1), datetime(2026, 1, 31)
        else:
            m.start, m.end = datetime(2026, 3, 1), datetime(2026, 5, 1)
    others += filler
    # losing duplicates of kept event titles
    for src, how in ((events[0], "lower"), (events[20], "lower"), (events[40], "lower"), (events[60], "tie")):
        dup = Market(src.title, src.question + " (duplicate listing)", f"dup-{how}", None, slug=src.slug,
                     volume=src.volume if how == "tie" else round(src.volume / 3, 2))
        dup.key = src.title
        others.append(dup)

    ids = iter(range(510001, 520000))
    for m in events:
        m.market_id = str(next(ids))
        m.start = m.when - timedelta(days=12)
        m.end = m.when + timedelta(days=2)
    for m in others:
        m.market_id = str(next(ids))
        if m.start is None:
            m.start, m.end = datetime(2026, 2, 1), datetime(2026, 4, 1)
    return events, others


def build_polymarket(out: Path, events: list[Market], others: list[Market]) -> None:
    rng = random.Random(23)
    (out / "polymarket").mkdir(parents=True, exist_ok=True)
    rows = []
    for m in events + others:
        rows.append([m.market_id, m.title, m.slug, m.question, m.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
                     m.end.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{m.volume:.2f}", "true" if m.binary else "false"])
    rng.shuffle(rows)
    with open(out / "polymarket" / "markets.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["market_id", "event_title", "event_slug", "question", "start", "end", "volume_usd", "is_binary"])
        w.writerows(rows)

    trades = []
    scan_start = datetime(2026, 2, 13)
    for m in events:
        # the burst ends exactly at the designed spike time
        for k in range(10):
            t = m.when - timedelta(minutes=36 - 4 * k)
            trades.append((m.market_id, t, round(rng.uniform(4_000, 30_000), 2)))
        # thin background trading, never within three hours of the spike
        lo, hi = max(m.start, scan_start - timedelta(days=5)), m.end
        for _ in range(18):
            t = lo + timedelta(seconds=rng.randrange(int((hi - lo).total_seconds())))
            if abs((t - m.when).total_seconds()) < 3 * 3600:
                continue
            trades.append((m.market_id, t, round(rng.uniform(5, 400), 2)))
    for m in others:
        if m.outcome == "dropped" and m.title.startswith("Golden"):
            continue  # no trades at all
        lo = m.start
        hi = min(m.end, scan_start - timedelta(seconds=1)) if m.outcome == "dropped" else m.end
        for _ in range(12):
            t = lo + timedelta(seconds=rng.randrange(int((hi - lo).total_seconds())))
            trades.append((m.market_id, t, round(rng.uniform(5, 5_000), 2)))
    trades.sort(key=lambda r: (r[1], r[0]))
    with open(out / "polymarket" / "trades.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["market_id", "ts", "usd_size"])
        for mid, t, usd in trades:
            w.writerow([mid, t.replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ"), f"{usd:.2f}"])


# --- mentions -------------------------------------------------------------------

HANDLES = ["newsdesk_j", "mkpolitics", "sportsline_amy", "lena_reports", "courtwatcher",
           "bayareabeat", "stat_nerd", "wirewatch", "fieldnotes_r", "cap_hill_k", "gridiron_gab",
           "marketmoves", "tlfan88", "dataviz_d", "localnews_tx", "hoopsdaily"]
SITES = {"news": "https://www.newswire.example/story/", "bluesky": "https://bsky.app/profile/",
         "facebook_public": "https://www.facebook.com/", "youtube": "https://www.youtube.com/watch?v=",
         "instagram_public": "https://www.instagram.com/p/", "forum": "https://forum.example.net/t/",
         "reddit": "https://www.reddit.com/r/news/comments/", "blog": "https://blog.example.com/"}
TAILS = {"sports": ["live updates", "what to watch", "first reaction", "recap and takeaways"],
         "politics": ["latest developments", "what we know", "reaction pours in", "live updates"],
         "macro_crypto": ["markets react", "what it means", "first take", "live coverage"],
         "other": ["what we know", "live coverage", "tributes and reaction", "latest"]}


@dataclass
class Corpus:
    docs: list[dict] = field(default_factory=list)
    oembed: dict[int, dict] = field(default_factory=dict)
    n: int = 0

    def _guid(self, channel: str, ts: int) -> str:
        self.n += 1
        if channel == "twitter":
            return str(encode_snowflake(ts, RNG.randrange(1 << 22)))
        return f"{channel[:2]}{ts // 1000:x}{self.n:04d}"

    def add(self, channel: str, ts: int, text: str, title: str | None = None,
            snippet: str | None = None, tweet: str | None = None, missing: bool = False) -> str:
        guid = self._guid(channel, ts)
        handle = HANDLES[self.n % len(HANDLES)]
        if channel == "twitter":
            url = f"https://twitter.com/{handle}/status/{guid}"
            if not missing:
                when = datetime.fromtimestamp(ts / 1000, UTC).strftime("%B %-d, %Y")
                body = tweet or text
                self.oembed[int(guid)] = {
                    "url": url, "author_name": handle.replace("_", " ").title(),
                    "author_url": f"https://twitter.com/{handle}", "type": "rich", "version": "1.0",
                    "provider_name": "Twitter", "width": 550,
                    "html": (f'<blockquote class="twitter-tweet"><p lang="en" dir="ltr">{html.escape(body)}</p>'
                             f'&mdash; {html.escape(handle)} (@{handle}) <a href="{url}">{when}</a></blockquote>\n'),
                }
        else:
            url = SITES[channel] + guid
        self.docs.append({"guid": guid, "channel": channel, "ts": ts, "text": text, "title": title,
                          "snippet": snippet, "url": url, "author": handle})
        return guid


def _heads(q) -> list[str]:
    return [c[0] for c in q.clusters]


class DocMaker:
    def __init__(self, corpus: Corpus, event: Event, news, x):
        self.c, self.e, self.news, self.x = corpus, event, news, x
        self.ks = KeywordSet.from_queries(news, x)
        self.tails = TAILS.get(event.category, TAILS["other"])

    def _tail(self, ts: int) -> str:
        return self.tails[(ts // 60000) % len(self.tails)]

    def verified(self, channel: str, ts: int) -> None:
        heads = _heads(self.x)
        if channel == "twitter":
            words = list(heads)
            text = " ".join(words) + " " + self._tail(ts)
            for term in self.news.terms():
                if len(self.ks.matched(text)) >= 2:
                    break
                if term not in words:
                    words.append(term)
                    text = " ".join(words) + " " + self._tail(ts)
            assert len(self.ks.matched(text)) >= 2, (self.e.event_id, text)
            self.c.add("twitter", ts, text)
            return
        title = f"{' and '.join(heads)}: {self._tail(ts)}"
        snippet = f"Reporting on {heads[0]} as the story develops."
        self.c.add(channel, ts, f"{title}. {snippet}", title=title, snippet=snippet)

    def adjudicated(self, ts: int) -> bool:
        """One name keyword plus an event word; only the adjudicator can pass it."""
        heads = _heads(self.x)
        if len(heads) > 1:
            if not heads[0].isalnum():
                return False
            # the glued fan tag still satisfies the provider's substring match
            heads = [heads[0] + "Nation", *heads[1:]]
        for word in sorted(EVENT_WORDS):
            text = f"{' '.join(heads)} {word} tonight"
            if len(self.ks.matched(text)) == 1 and FallbackBackend().adjudicate(text, self.ks.matched(text)[0]):
                self.c.add("twitter", ts, text)
                return True
        return False

    def polluted(self, channel: str, ts: int) -> None:
        heads = _heads(self.x)
        if channel == "twitter":
            if all(h.isalnum() for h in heads):
                text = "#" + "".join(heads) + "Fans trending again"
                assert not self.ks.matched(text), text
                self.c.add("twitter", ts, text)
            else:
                self.c.add("twitter", ts, " ".join(heads), missing=True)
            return
        title, snippet = "Morning briefing", "A roundup of the stories we are following today."
        assert not self.ks.matched(f"{title} {snippet}")
        self.c.add(channel, ts, f"{title}. {snippet} Also: {' '.join(heads)}.", title=title, snippet=snippet)


EXTRA_CHANNELS = ["bluesky", "facebook_public", "youtube", "forum", "reddit", "blog", "instagram_public"]


def realise(corpus: Corpus, event: Event, outcome: str, base: int, idx: int) -> dict:
    """Documents for one event; returns what the pipeline should find."""
    news, x = draft_booleans(event, FallbackBackend())
    mk = DocMaker(corpus, event, news, x)
    expect: dict = {"outcome": outcome}
    if outcome.startswith("pair:"):
        delta = float(outcome[5:])
        gap = round(abs(delta) * MS_PER_MINUTE)
        if delta < 0:
            t_news, t_x = base, base + gap
            winner = "news"
        else:
            t_x = base if "Atl" not in event.title else event.t_e - 20 * MS_PER_MINUTE
            t_news = t_x + gap
            winner = "twitter"
        mk.verified("news", t_news)
        mk.verified("twitter", t_x)
        expect.update(hit=True, winner=winner, t_news=t_news, t_x=t_x)
        last = max(t_news, t_x)
    elif outcome.startswith("win:"):
        winner = ch(outcome[4:])
        done = winner == "twitter" and idx % 4 == 1 and mk.adjudicated(base)
        if not done:
            mk.verified(winner, base)
        if idx % 3 == 0:
            mk.polluted(winner, base - 10 * MS_PER_MINUTE)  # earlier, off-topic
        if winner == "twitter" and idx % 2 == 0:
            mk.polluted("news", base - 15 * MS_PER_MINUTE)
        expect.update(hit=True, winner=winner, adjudicated=done)
        last = base
    else:
        expect.update(hit=False)
        if outcome == "miss:news":
            mk.polluted("news", base)
        elif outcome == "miss:x":
            mk.polluted("twitter", base)
        return expect
    if idx % 3 == 1:
        pool = [c for c in EXTRA_CHANNELS if c != expect["winner"]]
        mk.verified(pool[idx % len(pool)], last + (20 + idx % 7 * 30) * MS_PER_MINUTE)
    return expect


NOISE = [
    ("news", "Weather: a cool and breezy week ahead", "Forecasters expect showers midweek."),
    ("news", "Local bakery marks 50 years", "The family-run shop celebrates with free pastries."),
    ("bluesky", None, "anyone else watching the eclipse replay, it is unreal"),
    ("forum", "Best budget headphones thread", "Post your picks under 100 dollars."),
    ("reddit", "Photos from my hike this weekend", "Wildflowers everywhere on the ridge."),
    ("youtube", "10 minute morning stretch routine", "Follow along with this gentle routine."),
    ("blog", "Notes on sourdough hydration", "Higher hydration gave a more open crumb."),
    ("facebook_public", "Community cleanup on Saturday", "Gloves and bags will be provided."),
    ("twitter", None, "coffee first, emails later"),
    ("instagram_public", None, "sunset from the pier tonight"),
]


def add_noise(corpus: Corpus, start: datetime, days: int, per_day: int) -> None:
    rng = random.Random(5)
    for k in range(days):
        for _ in range(per_day):
            channel, title, text = NOISE[rng.randrange(len(NOISE))]
            ts = ms(start + timedelta(days=k, minutes=rng.randrange(1440)))
            corpus.add(channel, ts, text, title=title, snippet=text if title else None)


# --- assembly --------------------------------------------------------------------

MOCK_CONFIG = """\
# Mock-mode run over the packaged fixture corpus.
run_id: mock
out_dir: runs
mode: mock
backend: fallback
surfaces: [wcep, polymarket]
fixtures: .
probe: ["Markazi High School"]
"""


def seeded_events(out: Path) -> tuple[list[Event], list[Event]]:
    cfg = RunConfig.from_dict({"fixtures": str(out)})
    rep_a = seed_wcep(cfg.wcep_window, fixture_pages(out / "wcep"),
                      FixturePageviews(out / "pageviews.csv"))
    rep_b = seed_polymarket(out / "polymarket" / "markets.csv", out / "polymarket" / "trades.csv",
                            cfg.pm_window)
    return rep_a.events, rep_b.events


def build(out: Path) -> dict:
    keys = build_wcep(out)
    b_events, b_others = design_b()
    build_polymarket(out, b_events, b_others)
    events_a, events_b = seeded_events(out)

    corpus = Corpus()
    design: dict[str, dict] = {}
    by_key = {(e.source_key, datetime.fromtimestamp(e.t_e / 1000, UTC).date()): e for e in events_a}
    assert len(by_key) == 50, len(by_key)
    for (article, day), key in sorted(keys.items(), key=lambda kv: kv[1]):
        e = by_key[(article, day)]
        i = int(key[1:]) - 1
        outcome = A[i][5]
        base = e.t_e + (6 * 60 + (i * 53) % 480) * MS_PER_MINUTE
        design[e.event_id] = {"sample": "A", "key": key, "title": e.title, **realise(corpus, e, outcome, base, i)}
    markets = {m.market_id: m for m in b_events}
    for i, e in enumerate(sorted(events_b, key=lambda e: e.event_id)):
        m = markets[e.source_key]
        assert e.t_e == ms(m.when), e.event_id
        base = e.t_e + (1 + i % 4) * MS_PER_MINUTE
        design[e.event_id] = {"sample": "B", "title": e.title, **realise(corpus, e, m.outcome, base, i)}

    # the probe target's country shows up later that day in an unrelated story
    markazi = next(e for e in events_a if e.source_key.startswith("Markazi"))
    t = markazi.t_e + 15 * 3600 * 1000
    title = "Gunmen attack a polio vaccination team in Pakistan's Khyber district"
    snippet = "Two police officers escorting the team were killed, officials said."
    corpus.add("news", t, f"{title}. {snippet}", title=title, snippet=snippet)
    design[markazi.event_id]["probe_decoy"] = {"ts": t, "title": title}

    add_noise(corpus, datetime(2026, 2, 13), 90, 2)
    corpus.docs.sort(key=lambda r: (r["ts"], r["guid"]))
    with open(out / "mentions.jsonl", "w", encoding="utf-8") as fh:
        for rec in corpus.docs:
            rec = {k: v for k, v in rec.items() if v is not None}
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")
    (out / "oembed").mkdir(exist_ok=True)
    for guid, payload in corpus.oembed.items():
        (out / "oembed" / f"{guid}.json").write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                                                     encoding="utf-8")
    (out / "mock.yaml").write_text(MOCK_CONFIG, encoding="utf-8")
    with open(out / "design.json", "w", encoding="utf-8") as fh:
        json.dump(design, fh, indent=1, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return design


def check(out: Path, design: dict) -> list[str]:
    """Run the real pipeline and compare against the design; returns problems."""
    problems = []
    with tempfile.TemporaryDirectory() as tmp:
        cfg = RunConfig.load(out / "mock.yaml", {"out_dir": tmp})
        outcome = full_run(cfg)
        runs = Path(tmp) / cfg.run_id
        manifest = json.loads((runs / "manifest.json").read_text())
        if outcome.failures:
            problems += [f"failure: {f}" for f in outcome.failures]
        earliest = {eid: {c: dict(r, channel=c) for c, r in
                          manifest["events"][eid].get("verification", {}).items()}
                    for eid in design}
        for eid, want in design.items():
            got = earliest[eid]
            if bool(got) != want["hit"]:
                problems.append(f"{eid} {want['title']!r}: hit={bool(got)} want {want['hit']} "
                                f"({sorted(got)}; status {manifest['events'][eid]['status']})")
                continue
            if not want["hit"]:
                continue
            first = min(got.values(), key=lambda r: (r["ts"], r["channel"]))["channel"]
            if first != want["winner"]:
                problems.append(f"{eid} {want['title']!r}: winner {first} want {want['winner']}")
            if "t_news" in want:
                if got.get("news", {}).get("ts") != want["t_news"] or got.get("twitter", {}).get("ts") != want["t_x"]:
                    problems.append(f"{eid}: paired timestamps differ")
            elif "news" in got and "twitter" in got:
                problems.append(f"{eid} {want['title']!r}: unplanned twitter/news pair")
        print((runs / "tables" / "hits.txt").read_text())
        print((runs / "tables" / "winners.txt").read_text())
        print((runs / "tables" / "paired_a.txt").read_text())
        print((runs / "tables" / "paired_b.txt").read_text())
        print((runs / "tables" / "probe.txt").read_text())
        print(json.dumps(manifest["run_stages"]["seed"], indent=1))
    return problems


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=DEFAULT_OUT)
    args = ap.parse_args(argv)
    with tempfile.TemporaryDirectory() as tmp:
        stage = Path(tmp) / "fixtures"
        stage.mkdir()
        design = build(stage)
        problems = check(stage, design)
        if problems:
            print("\n".join(problems), file=sys.stderr)
            return 1
        if args.out.exists():
            shutil.rmtree(args.out)
        shutil.copytree(stage, args.out)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
