"""Byte bijection and encode/decode engine tests."""

import random
import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retok import decode, decode_text, encode
from retok.bpe import UnknownIdError, apply_merges
from retok.bytelevel import bijection_map, symbols_to_bytes, text_to_symbols

from conftest import make_model, naive_bpe, naive_encode, random_bytes, random_text


class TestBijection:
    def test_known_forward_values(self):
        fwd = bijection_map().forward
        assert fwd[0xE0] == "à"
        assert fwd[0xA4] == "¤"
        assert fwd[0xA8] == "¨"
        assert fwd[0x20] == "Ġ"

    def test_exact_inverse(self):
        bij = bijection_map()
        for b in range(256):
            assert bij.inverse[bij.forward[b]] == b

    def test_image_avoids_whitespace_and_controls(self):
        for ch in bijection_map().forward.values():
            assert ch not in (" ", "\t", "\n")
            assert unicodedata.category(ch) not in ("Zs", "Cc", "Cf")

    def test_symbol_round_trip_all_bytes(self):
        data = bytes(range(256))
        assert symbols_to_bytes(bijection_map().encode_bytes(data)) == data


class TestEncodeBasics:
    def test_single_byte_inputs_one_token(self, byte_model):
        for b in range(256):
            assert len(encode(byte_model, bytes([b]))) == 1

    def test_three_byte_char_three_tokens(self, byte_model):
        seq = encode(byte_model, "न")  # U+0928, 3 UTF-8 bytes
        assert len(seq) == 3

    def test_merge_free_token_count_equals_byte_count(self, byte_model):
        rng = random.Random(7)
        for _ in range(200):
            data = random_bytes(rng)
            assert len(encode(byte_model, data)) == len(data)

    def test_empty_input(self, byte_model):
        seq = encode(byte_model, "")
        assert len(seq) == 0
        assert decode(byte_model, seq) == b""

    def test_ignore_merges_prefers_whole_token(self):
        s = text_to_symbols
        with_priority = make_model(
            merges=[(s("a"), s("b"))], extra_tokens=[s("abc")], ignore_merges=True
        )
        without = with_priority.replace(ignore_merges=False)
        assert encode(with_priority, "abc").surfaces == [s("abc")]
        assert encode(without, "abc").surfaces == [s("ab"), s("c")]

    def test_specials_encode_and_decode_literally(self, base):
        text = "before <|eos|> after"
        seq = encode(base, text)
        eos = next(sp for sp in base.special_tokens if sp.surface == "<|eos|>")
        assert eos.id in seq.ids
        assert decode_text(base, seq) == text

    def test_decode_unknown_id(self, byte_model):
        with pytest.raises(UnknownIdError):
            decode(byte_model, [9999])


class TestMergeOrder:
    def test_rank_priority_beats_position(self):
        # (b, c) has the lower rank, so it fires before the leftmost (a, b).
        ranks = {("b", "c"): 0, ("a", "b"): 1}
        assert apply_merges(list("abc"), ranks) == ["a", "bc"]

    def test_leftmost_on_equal_rank(self):
        ranks = {("a", "a"): 0}
        assert apply_merges(list("aaa"), ranks) == ["aa", "a"]

    def test_matches_naive_reference_random(self):
        rng = random.Random(42)
        alphabet = "abcd"
        for _ in range(300):
            n_merges = rng.randint(0, 12)
            pieces = set()
            merges = []
            pool = list(alphabet)
            for _m in range(n_merges):
                left, right = rng.choice(pool), rng.choice(pool)
                merges.append((left, right))
                pool.append(left + right)
            ranks = {}
            for i, pair in enumerate(merges):
                ranks.setdefault(pair, i)
            text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 64)))
            assert apply_merges(list(text), ranks) == naive_bpe(list(text), ranks)

    def test_engine_matches_naive_encoder_on_base(self, base):
        rng = random.Random(11)
        for _ in range(100):
            text = random_text(rng)
            assert encode(base, text).surfaces == naive_encode(base, text)

    def test_duplicate_merge_entries_earliest_rank_wins(self):
        s = text_to_symbols
        model = make_model(merges=[(s("a"), s("b")), (s("a"), s("b"))], ignore_merges=False)
        assert model.merge_ranks[(s("a"), s("b"))] == 0
        assert encode(model, "ab").surfaces == [s("ab")]


class TestRoundTrip:
    def test_fuzz_bytes_on_byte_model(self, byte_model):
        rng = random.Random(1)
        for _ in range(500):
            data = random_bytes(rng)
            assert decode(byte_model, encode(byte_model, data)) == data

    def test_fuzz_text_on_base(self, base):
        rng = random.Random(2)
        for _ in range(500):
            text = random_text(rng)
            assert decode_text(base, encode(base, text)) == text

    @given(st.text(max_size=80))
    @settings(max_examples=300, deadline=None)
    def test_hypothesis_text_round_trip(self, text):
        model = make_model()
        data = text.encode("utf-8", errors="surrogateescape")
        assert decode(model, encode(model, data)) == data

    @given(st.binary(max_size=64))
    @settings(max_examples=300, deadline=None)
    def test_hypothesis_binary_round_trip(self, data):
        model = make_model()
        assert decode(model, encode(model, data)) == data

    def test_invalid_utf8_round_trips(self, base):
        for data in (b"\xff\xfe\xfd", b"\xe0\xa4", b"a\x80b", b"\xf0\x9f"):
            assert decode(base, encode(base, data)) == data
