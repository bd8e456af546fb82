import random
from datetime import date

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newsrace import lexicons as lx
from newsrace.seed_wcep import (
    ArticleNotFound,
    FixturePageviews,
    PageviewRecord,
    RestPageviews,
    WcepBullet,
    fetch_pageviews,
    fixture_pages,
    parse_wcep_page,
    rank_and_cap,
    regroup_category,
    scrape_wcep,
    seed_wcep,
    us_filter,
)

APRIL = (date(2026, 4, 12), date(2026, 5, 11))

PAGE = """
<div class="current-events-main vevent" id="2026_April_11">
 <div class="current-events-content description">
  <p><b>Sports</b></p>
  <ul><li>Early item <a href="/wiki/Too_Early">link</a>.</li></ul>
 </div>
</div>
<div class="current-events-main vevent" id="2026_April_12">
 <div class="current-events-content description">
  <p><b>Law and crime</b></p>
  <ul>
   <li><a href="/wiki/Supreme_Court_of_the_United_States">Supreme Court</a>
    <ul>
     <li>The court hears a case from <a href="/wiki/Ohio">Ohio</a>. <a class="external text" href="https://x.org">(AP)</a></li>
    </ul>
   </li>
  </ul>
  <div class="current-events-content-heading">Sports</div>
  <ul><li>A bullet with only an external link <a class="external" href="https://y.org">(BBC)</a></li></ul>
 </div>
</div>
<div class="current-events-main vevent" id="2026_April_">
 <div class="current-events-content"><ul><li>broken <a href="/wiki/X">x</a></li></ul></div>
</div>
"""


def bullet(text="The U.S. Senate votes.", article="A", day=date(2026, 4, 20), cat="Sports"):
    return WcepBullet(day, text, article, cat)


class TestParse:
    def test_three_bullets_one_outside(self):
        res = scrape_wcep(APRIL, lambda y, m: PAGE if m == "April" else None)
        # 3 parsed leaf bullets with links minus the April 11 one
        assert [b.event_date for b in res.bullets] == [date(2026, 4, 12)]
        b = res.bullets[0]
        assert b.linked_article == "Ohio"
        assert b.alternates == ()
        assert b.bullet_text == "The court hears a case from Ohio."
        assert b.wcep_category == "Law and crime"
        # the external-only bullet inherits nothing and is reported
        assert any("without article link" in e for e in res.errors)
        assert any("2026_April_" in e for e in res.errors)
        assert any("May 2026" in e for e in res.errors)

    def test_parent_link_fallback(self):
        page = PAGE.replace('from <a href="/wiki/Ohio">Ohio</a>', "from Ohio")
        b = parse_wcep_page(page).bullets[1]
        assert b.linked_article == "Supreme Court of the United States"

    def test_heading_div_style(self):
        page = PAGE.replace('(BBC)</a></li>', '(BBC)</a> <a href="/wiki/NBA">NBA</a></li>')
        cats = [b.wcep_category for b in parse_wcep_page(page).bullets]
        assert cats[-1] == "Sports"

    def test_empty_window(self):
        assert scrape_wcep((date(2026, 5, 1), date(2026, 4, 1)), lambda y, m: PAGE).bullets == []

    def test_packaged_corpus_counts(self, fixtures_dir):
        res = scrape_wcep(APRIL, fixture_pages(fixtures_dir / "wcep"))
        assert len(res.bullets) == 586
        assert sum(us_filter(b) for b in res.bullets) == 171
        assert {regroup_category(b.wcep_category) for b in res.bullets} <= {
            "politics", "sports", "macro_crypto", "other"}


class TestFilter:
    @pytest.mark.parametrize("text,want", [
        ("Officials said the Federal Reserve announced a pause.", True),
        ("Protests continue in Budapest.", False),
        ("", False),
        ("The American Samoa delegation arrives.", True),
        ("A Georgia court convicts the former president.", True),
        ("the federal reserve, lowercase, still counts", True),
        ("us forces, lowercase abbreviation, does not", False),
    ])
    def test_examples(self, text, want):
        assert us_filter(_raw_bullet(text)) is want

    def test_custom_lexicon(self):
        lexicon = lx.parse_lexicon("Budapest\n")
        assert us_filter(_raw_bullet("Protests continue in Budapest."), lexicon)

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz ,.", max_size=80))
    def test_lowercase_noise_never_matches_exact_case_terms(self, text):
        lexicon = [t for t in lx.us_lexicon() if t.exact_case and t.term != t.term.lower()]
        assert not us_filter(_raw_bullet(text), lexicon)

    @given(st.sampled_from([t.term for t in lx.us_lexicon()]), st.text(alphabet="xyz ", max_size=10))
    def test_any_lexicon_term_matches(self, term, pad):
        assert us_filter(_raw_bullet(f"{pad} {term} {pad}"))


def _raw_bullet(text):
    # bypasses the non-empty check so the filter itself sees empty text
    b = object.__new__(WcepBullet)
    object.__setattr__(b, "bullet_text", text)
    return b


class TestPageviews:
    def test_total(self):
        assert PageviewRecord("2026 NFL draft", 200000, 236044).total == 436044
        assert PageviewRecord("x", 0, 0).total == 0
        assert PageviewRecord("x", 100, 50).total == 150

    def test_fixture_lookup(self, fixtures_dir):
        pv = FixturePageviews(fixtures_dir / "pageviews.csv")
        rec = fetch_pageviews("2026 NFL draft", date(2026, 4, 23), pv)
        assert rec.total == 436044

    def test_unknown_article_is_zero_with_warning(self, fixtures_dir):
        warns = []
        pv = FixturePageviews(fixtures_dir / "pageviews.csv")
        assert fetch_pageviews("No such page", date(2026, 4, 23), pv, warns.append).total == 0
        assert warns

    def test_rest_client(self):
        class Resp:
            def __init__(self, code, body=None):
                self.status_code, self.body = code, body or {}

            def json(self):
                return self.body

            def raise_for_status(self):
                pass

        class Session:
            headers = {}

            def __init__(self, replies):
                self.replies, self.urls = list(replies), []

            def get(self, url, timeout):
                self.urls.append(url)
                return self.replies.pop(0)

        s = Session([Resp(503), Resp(200, {"items": [{"views": 42}]})])
        client = RestPageviews(session=s, sleep=lambda x: None)
        assert client.daily("Billy Idol", date(2026, 4, 19)) == 42
        assert "Billy_Idol/daily/2026041900/2026041900" in s.urls[-1]
        with pytest.raises(ArticleNotFound):
            RestPageviews(session=Session([Resp(404)]), sleep=lambda x: None).daily("x", date(2026, 1, 1))


class TestRank:
    def test_cap_binds(self):
        bs = [bullet(text=f"b{i}", article="Same") for i in range(5)]
        pv = [PageviewRecord("Same", 10 * i, 0) for i in range(5)]
        res = rank_and_cap(bs, pv, per_article_cap=3, top_n=50)
        assert [e.description for e in res.events] == ["b4", "b3", "b2"]
        assert res.shortfall == 47

    def test_against_sort_oracle(self):
        rng = random.Random(3)
        bs = [bullet(text=f"bullet {i}", article=f"Article {i}", day=date(2026, 4, 12 + i % 18))
              for i in range(60)]
        pv = [PageviewRecord(b.linked_article, rng.randrange(10**6), rng.randrange(10**6)) for b in bs]
        res = rank_and_cap(bs, pv)
        oracle = sorted(range(60), key=lambda i: (-(pv[i].day0_views + pv[i].day1_views), i))[:50]
        assert [e.description for e in res.events] == [f"bullet {i}" for i in oracle]

    def test_categories_regrouped(self):
        assert regroup_category("Armed conflicts and attacks") == "politics"
        assert regroup_category("Science and technology") == "macro_crypto"
        assert regroup_category("Something new") == "other"


def test_packaged_seed(fixtures_dir):
    rep = seed_wcep(APRIL, fixture_pages(fixtures_dir / "wcep"), FixturePageviews(fixtures_dir / "pageviews.csv"))
    assert (rep.candidates, rep.passed_filter, len(rep.events), rep.distinct_articles) == (586, 171, 50, 39)
    assert rep.shortfall == 0
    assert sum(e.event_id.startswith("wcep-") for e in rep.events) == 50
