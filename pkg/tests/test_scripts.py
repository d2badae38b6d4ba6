"""Script table classification and token profiling tests."""

import pytest

from retok import classify_codepoint, default_table, profile_token
from retok.bytelevel import bijection_map, text_to_symbols
from retok.scripts import NEUTRAL, ScriptTable, char_boundaries


class TestClassify:
    def test_oriya_block_exhaustive(self, table):
        for cp in range(0x0B00, 0x0B80):
            assert classify_codepoint(table, cp) == "oriya"

    def test_known_points(self, table):
        assert classify_codepoint(table, "ଓ") == "oriya"
        assert classify_codepoint(table, "A") == "latin"
        assert classify_codepoint(table, "0") == NEUTRAL
        assert classify_codepoint(table, "न") == "devanagari"
        assert classify_codepoint(table, "你") == "cjk"

    def test_neutral_overrides_inside_blocks(self, table):
        # danda sits inside the Devanagari block but is shared punctuation
        assert classify_codepoint(table, "।") == NEUTRAL
        assert classify_codepoint(table, "॥") == NEUTRAL

    def test_zwj_zwnj_zwsp_neutral(self, table):
        for cp in ("‌", "‍", "​"):
            assert classify_codepoint(table, cp) == NEUTRAL

    def test_unknown_codepoint_neutral(self, table):
        assert classify_codepoint(table, 0x10FF00) == NEUTRAL

    def test_hiragana_katakana_share_class(self, table):
        assert table.classify_class(ord("あ")) == "japanese"  # hiragana a
        assert table.classify_class(ord("ア")) == "japanese"  # katakana a


class TestTableData:
    def test_overlapping_blocks_rejected(self):
        with pytest.raises(ValueError):
            ScriptTable(
                blocks=[(0x100, 0x200, "a", "a"), (0x1FF, 0x300, "b", "b")],
                neutral=[],
            )

    def test_save_load_round_trip(self, table, tmp_path):
        path = tmp_path / "table.json"
        table.save(path)
        again = ScriptTable.load(path)
        assert again.blocks == table.blocks
        assert again.neutral == table.neutral
        assert again.version == table.version

    def test_brahmic_and_prune_scripts_present(self, table):
        names = {b[2] for b in table.blocks}
        for script in (
            "devanagari", "bengali", "tamil", "telugu", "kannada",
            "malayalam", "gujarati", "gurmukhi", "oriya",
            "cjk", "hangul", "hiragana", "katakana", "arabic",
            "cyrillic", "thai", "greek", "hebrew", "sinhala",
        ):
            assert script in names


class TestProfile:
    def test_latin_token(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("abc"))
        assert prof.byte_length == 3
        assert prof.scripts == {"latin"}
        assert not prof.is_cross_script
        assert not prof.is_partial_char

    def test_cross_script_token(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("aन"))
        assert prof.is_cross_script
        assert prof.scripts == {"latin", "devanagari"}

    def test_long_latin_token(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("x" * 33))
        assert prof.byte_length == 33

    def test_neutral_only_token(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("123 .,"))
        assert prof.scripts == set()
        assert not prof.is_cross_script

    def test_lead_byte_determines_script(self, table, byte_model):
        # E0 A4 prefix bounds the code point inside the Devanagari block.
        fwd = bijection_map().forward
        two = fwd[0xE0] + fwd[0xA4]
        prof = profile_token(byte_model, table, two)
        assert prof.scripts == {"devanagari"}
        assert prof.is_partial_char

    def test_bare_lead_is_undetermined(self, table, byte_model):
        fwd = bijection_map().forward
        prof = profile_token(byte_model, table, fwd[0xE0])
        assert prof.scripts == set()
        assert prof.is_partial_char

    def test_bare_continuation_is_undetermined(self, table, byte_model):
        fwd = bijection_map().forward
        prof = profile_token(byte_model, table, fwd[0xA4])
        assert prof.scripts == set()
        assert prof.is_partial_char

    def test_oriya_prefix_fragment(self, table, byte_model):
        # E0 AC bounds the code point inside the Oriya block (U+0B00-0B3F).
        fwd = bijection_map().forward
        prof = profile_token(byte_model, table, fwd[0xE0] + fwd[0xAC])
        assert prof.scripts == {"oriya"}

    def test_danda_never_makes_cross_script(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("नम।"))
        assert prof.scripts == {"devanagari"}
        assert not prof.is_cross_script

    def test_whole_word_not_partial(self, table, byte_model):
        prof = profile_token(byte_model, table, text_to_symbols("भारत"))
        assert not prof.is_partial_char
        assert prof.byte_length == 12

    def test_profile_total_over_vocab(self, table, base):
        # pure and total: every token profiles without raising, twice alike
        for token in base.vocab:
            first = profile_token(base, table, token)
            second = profile_token(base, table, token)
            assert first == second


class TestCharBoundaries:
    def test_ascii(self):
        assert char_boundaries(b"abc") == {0, 1, 2, 3}

    def test_multibyte(self):
        data = "नa".encode("utf-8")  # 3 + 1 bytes
        assert char_boundaries(data) == {0, 3, 4}

    def test_invalid_bytes_form_single_runs(self):
        bounds = char_boundaries(b"\x80\x80a")
        assert 0 in bounds and 2 in bounds and 3 in bounds
