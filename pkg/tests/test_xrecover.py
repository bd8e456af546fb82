import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from newsrace.model import Mention, iso
from newsrace.xrecover import (
    OembedClient,
    OembedUnavailable,
    decode_snowflake,
    encode_snowflake,
    fixture_get,
    parse_guid,
    recover_mention,
    strip_tweet_html,
)

from oracles import snowflake_iso, snowflake_ms


class TestSnowflake:
    def test_epoch_identity(self):
        assert decode_snowflake(0) == 1_288_834_974_657
        assert iso(decode_snowflake(0)) == "2010-11-04T01:42:54.657Z"

    def test_unit_shift(self):
        assert decode_snowflake(1 << 22) == 1_288_834_974_658

    def test_random_ids_match_big_integer_oracle(self):
        rng = random.Random(11)
        for _ in range(1000):
            guid = rng.getrandbits(64)
            assert decode_snowflake(guid) == snowflake_ms(guid)
            assert iso(decode_snowflake(guid)) == snowflake_iso(guid)

    def test_low_bits_ignored(self):
        assert decode_snowflake((4_194_304_000 << 10) | 0x3FFFFF) == snowflake_ms(4_194_304_000 << 10)

    @given(st.integers(min_value=1_288_834_974_657, max_value=1_288_834_974_657 + (1 << 41) - 1),
           st.integers(min_value=0, max_value=(1 << 22) - 1))
    def test_encode_inverts(self, ms, low):
        assert decode_snowflake(encode_snowflake(ms, low)) == ms

    @pytest.mark.parametrize("bad", ["", "abc", "-5", str(1 << 64)])
    def test_rejects_malformed(self, bad):
        with pytest.raises(ValueError):
            decode_snowflake(bad)

    def test_guid_from_status_url(self):
        assert parse_guid("https://twitter.com/a/status/1234567890?s=20") == 1234567890


class TestStrip:
    def test_blockquote_text_kept(self):
        markup = ('<blockquote class="twitter-tweet"><p lang="en" dir="ltr">Mavericks beat the '
                  'Lakers <a href="https://t.co/x">pic.twitter.com/x</a></p>&mdash; Fan (@fan) '
                  '<a href="https://twitter.com/fan/status/1">March 3, 2026</a></blockquote>')
        assert strip_tweet_html(markup) == "Mavericks beat the Lakers pic.twitter.com/x"

    def test_entities_decoded(self):
        markup = '<blockquote><p>Q&amp;A with <a href="#">AT&amp;T</a> &quot;live&quot;</p></blockquote>'
        assert strip_tweet_html(markup) == 'Q&A with AT&T "live"'

    def test_empty(self):
        assert strip_tweet_html("") == ""


def _client(tmp_path, payloads):
    calls = []

    def get(url, params):
        calls.append(params["url"])
        guid = parse_guid(params["url"])
        return payloads.get(guid, (404, ""))

    return OembedClient(get, cache_dir=tmp_path / "cache", sleep=lambda s: None), calls


class TestOembed:
    def test_fetch_and_cache(self, tmp_path):
        body = json.dumps({"html": "<blockquote><p>hello world</p></blockquote>",
                           "author_url": "https://twitter.com/someone"})
        client, calls = _client(tmp_path, {5: (200, body)})
        got = client.fetch("https://twitter.com/someone/status/5")
        assert (got.text, got.author) == ("hello world", "someone")
        # second client over the same cache never hits the network
        again, calls2 = _client(tmp_path, {})
        assert again.fetch("https://twitter.com/someone/status/5").text == "hello world"
        assert len(calls) == 1 and calls2 == []

    def test_missing_and_empty(self, tmp_path):
        client, _ = _client(tmp_path, {7: (200, "")})
        for guid in (6, 7):
            with pytest.raises(OembedUnavailable):
                client.fetch(f"https://twitter.com/x/status/{guid}")

    def test_server_errors_retry(self, tmp_path):
        seq = iter([(503, ""), (200, json.dumps({"html": "<p>ok then</p>"}))])
        client = OembedClient(lambda u, p: next(seq), sleep=lambda s: None)
        assert client.fetch("https://twitter.com/x/status/9").text == "ok then"

    def test_recover_mention(self, tmp_path):
        guid = encode_snowflake(1_770_000_000_000, 77)
        (tmp_path / f"{guid}.json").write_text(json.dumps({"html": "<p>Body text</p>", "author_name": "n"}))
        client = OembedClient(fixture_get(tmp_path))
        m = recover_mention(Mention("twitter", str(guid)), client)
        assert m.recovered_ts == 1_770_000_000_000 and m.body == "Body text"
        missing = recover_mention(Mention("twitter", str(guid + 1)), client)
        assert missing.body is None and missing.recovered_ts == 1_770_000_000_000

    def test_undecodable_guid_leaves_undated(self):
        m = recover_mention(Mention("twitter", "not-a-guid"), None)
        assert m.recovered_ts is None

    def test_non_twitter_untouched(self):
        m = Mention("news", "n1", provider_ts=4)
        assert recover_mention(m, None) is m
