from datetime import date, datetime, timezone
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newsrace.model import (
    MS_PER_MINUTE,
    ChannelSet,
    Event,
    Mention,
    PairedDelta,
    Surface,
    Verification,
    delta_minutes,
    event_from_record,
    from_ms,
    iso,
    mention_from_record,
    parse_ts,
    to_ms,
    to_record,
)
from newsrace.store import (
    ManifestError,
    RunManifest,
    file_digest,
    load_events,
    load_mentions,
    read_jsonl,
    save_events,
    save_mentions,
    write_jsonl,
)


def make_event(**kw):
    base = dict(event_id="e1", surface="wcep", title="T", description="D", category="other",
                t_e=0, attention_prior=1.0, source_key="k")
    base.update(kw)
    return Event(**base)


class TestDelta:
    def test_identity(self):
        assert delta_minutes(1000, 1000) == 0

    def test_news_first_is_negative(self):
        t_x = 10**12
        t_news = t_x - round(21.6 * MS_PER_MINUTE)
        assert delta_minutes(t_news, t_x) == Fraction(-216, 10)

    def test_x_first_is_positive(self):
        t_x = 10**12
        assert float(delta_minutes(t_x + 72_000, t_x)) == 1.2

    def test_paired_delta_property(self):
        p = PairedDelta("e", t_news=120_000, t_x=60_000)
        assert p.delta == 1 and p.delta_min == 1.0


class TestTime:
    def test_naive_datetime_rejected(self):
        with pytest.raises(ValueError):
            to_ms(datetime(2026, 1, 1))

    def test_date_is_utc_midnight(self):
        assert to_ms(date(1970, 1, 2)) == 86_400_000

    def test_parse_forms_agree(self):
        ms = to_ms(datetime(2026, 4, 23, 6, 0, tzinfo=timezone.utc))
        assert parse_ts("2026-04-23T06:00:00Z") == ms
        assert parse_ts("2026-04-23T08:00:00+02:00") == ms
        assert parse_ts(ms // 1000) == ms
        assert parse_ts(str(ms)) == ms

    @given(st.integers(min_value=0, max_value=4_102_444_800_000))
    def test_iso_round_trip(self, ms):
        assert parse_ts(iso(ms)) == ms
        assert to_ms(from_ms(ms)) == ms


class TestRecords:
    def test_negative_prior_rejected(self):
        with pytest.raises(ValueError):
            make_event(attention_prior=-1)

    def test_source_key_required(self):
        with pytest.raises(ValueError):
            make_event(source_key="")

    def test_surface_coerced(self):
        assert make_event().surface is Surface.WCEP

    def test_mention_ts_per_channel(self):
        tw = Mention("twitter", "1", provider_ts=5, recovered_ts=9)
        nw = Mention("news", "2", provider_ts=5, recovered_ts=9)
        assert tw.ts == 9 and nw.ts == 5

    def test_record_round_trip(self):
        e = make_event(group_key="g")
        assert event_from_record(to_record(e)) == e
        m = Mention("news", "g1", provider_ts=3, title="t", verification=Verification.POLLUTED)
        rec = to_record(m)
        assert rec["verification"] == "polluted"
        assert mention_from_record(rec) == m


class TestChannels:
    def test_default_set(self):
        cs = ChannelSet()
        assert "twitter" in cs and "reddit" in cs and len(cs) == 9

    def test_duplicate_rejected(self):
        with pytest.raises(ValueError):
            ChannelSet(extra=("news",))

    def test_check_unknown(self):
        with pytest.raises(ValueError):
            ChannelSet(extra=()).check("reddit")


class TestStore:
    def test_jsonl_checksum_is_content_address(self, tmp_path):
        a = write_jsonl(tmp_path / "a.jsonl", [{"b": 1, "a": 2}])
        b = write_jsonl(tmp_path / "b.jsonl", [{"a": 2, "b": 1}])
        assert a == b == file_digest(tmp_path / "a.jsonl")

    def test_round_trips(self, tmp_path):
        events = [make_event(event_id=f"e{i}", t_e=i) for i in range(3)]
        save_events(tmp_path / "ev.jsonl", events)
        assert load_events(tmp_path / "ev.jsonl") == events
        ms = [Mention("twitter", "12", recovered_ts=7, body="x y")]
        save_mentions(tmp_path / "m.jsonl", ms)
        assert load_mentions(tmp_path / "m.jsonl") == ms

    def test_bad_line_reports_position(self, tmp_path):
        p = tmp_path / "bad.jsonl"
        p.write_text('{"a": 1}\n{oops\n')
        with pytest.raises(ValueError, match=":2:"):
            list(read_jsonl(p))

    def test_manifest_corrupt(self, tmp_path):
        p = tmp_path / "manifest.json"
        p.write_text("{not json")
        with pytest.raises(ManifestError):
            RunManifest.load(p)
        p.write_text('{"run_id": "x"}')
        with pytest.raises(ManifestError):
            RunManifest.load(p)

    def test_manifest_stage_marks(self, tmp_path):
        m = RunManifest.create(tmp_path / "manifest.json", "r", {}, "h")
        m.mark_stage("e", "draft", "c1")
        m.mark_stage("e", "pull", "c2")
        m.invalidate_from("e", "pull")
        assert m.stage_done("e", "draft") and not m.stage_done("e", "pull")
        m.save()
        assert RunManifest.load(m.path).data["events"]["e"]["stages"]["pull"]["status"] == "stale"
