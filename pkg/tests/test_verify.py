"""Structural verification check tests."""

from retok import (
    verify_max_byte_length,
    verify_no_cross_script_merges,
    verify_structural_identity,
    verify_unified,
)
from retok.bytelevel import text_to_symbols
from retok.model import SpecialToken, TokenizerModel
from retok.verify import render_unified

from conftest import make_model


class TestCrossScriptMerges:
    def test_clean_model_passes(self, base, table):
        report = verify_no_cross_script_merges(base, table)
        assert report.passed
        assert report.scanned == len(base.merges)
        assert "PASS" in report.render()

    def test_zero_merge_model_passes(self, byte_model, table):
        assert verify_no_cross_script_merges(byte_model, table).passed

    def test_latin_devanagari_merge_fails(self, table):
        s = text_to_symbols
        model = make_model(merges=[(s("a"), s("न"))], specials=())
        report = verify_no_cross_script_merges(model, table)
        assert not report.passed
        assert report.violations == 1
        assert "FAIL" in report.render()


class TestByteLength:
    def test_byte_fixture_any_ceiling(self, byte_model):
        assert verify_max_byte_length(byte_model, ceiling=1).passed

    def test_over_ceiling_fails(self):
        token = text_to_symbols("x" * 33)
        model = make_model(extra_tokens=[token], specials=())
        report = verify_max_byte_length(model, ceiling=32)
        assert not report.passed
        assert report.violations == 1

    def test_specials_not_scanned(self):
        model = make_model(specials=["<|a-very-long-special-token-far-over|>"])
        assert verify_max_byte_length(model, ceiling=8).passed


class TestStructuralIdentity:
    def test_model_vs_itself(self, base):
        assert verify_structural_identity(base, base).passed

    def test_normal_token_difference_fails(self, base):
        vocab = dict(base.vocab)
        probe = next(iter(vocab))
        other = base.replace(vocab={**vocab, probe + "X": vocab.pop(probe)})
        report = verify_structural_identity(base, other)
        assert not report.passed

    def test_special_only_difference_passes_with_notes(self, base):
        renamed = [
            SpecialToken(surface=sp.surface + "2", id=sp.id, pinned=sp.pinned)
            for sp in base.special_tokens
        ]
        other = base.replace(special_tokens=renamed)
        report = verify_structural_identity(base, other)
        assert report.passed
        assert report.notes

    def test_merge_difference_fails(self, base):
        other = base.replace(merges=base.merges[:-1])
        assert not verify_structural_identity(base, other).passed


class TestUnified:
    def test_clean_byte_level_row(self, base, table):
        rows = verify_unified([base], table)
        assert len(rows) == 1
        row = rows[0]
        assert row.vocab == base.size
        assert row.over_ceiling == 0
        assert row.cross_script == 0
        assert row.both_clean
        assert row.pretokenizer == "ByteLevel"

    def test_dirty_fixture_row(self, table):
        s = text_to_symbols
        model = make_model(
            merges=[(s("a"), s("न"))],
            extra_tokens=[s("y" * 40)],
            specials=(),
        )
        row = verify_unified([model], table)[0]
        assert row.over_ceiling == 1
        assert row.cross_script >= 1
        assert not row.both_clean

    def test_two_model_run_ordered(self, base, byte_model, table):
        rows = verify_unified([base, byte_model], table)
        assert [r.name for r in rows] == [base.name, byte_model.name]

    def test_plain_text_model_profiled_on_raw_text(self, table):
        # Metaspace-style vocabulary: no byte alphabet, marker stripped
        model = TokenizerModel(
            vocab={"▁hello": 0, "world": 1, "▁नम": 2},
            merges=[],
            ignore_merges=False,
            special_tokens=[],
            pretokenizer_pattern=None,
            byte_level=False,
            name="plain",
        )
        row = verify_unified([model], table)[0]
        assert row.pretokenizer == "plain"
        assert row.over_ceiling == 0
        assert row.cross_script == 0

    def test_render_table_shape(self, base, table):
        text = render_unified(verify_unified([base], table))
        assert "both clean?" in text.splitlines()[0]
        assert "Yes" in text
