"""Tokenizer definition file load/save/validate tests."""

import json

import pytest

from retok import load_tokenizer, save_tokenizer, validate_model
from retok.bytelevel import bijection_map, text_to_symbols
from retok.model import (
    ClosureError,
    DuplicateIdError,
    SpecialToken,
    TokenizerFormatError,
    VocabDiff,
)

from conftest import make_model


def write_minimal(path, vocab, merges, ignore_merges=True, added=(), pre_tokenizer=None):
    payload = {
        "version": "1.0",
        "added_tokens": list(added),
        "pre_tokenizer": pre_tokenizer,
        "model": {
            "type": "BPE",
            "ignore_merges": ignore_merges,
            "vocab": vocab,
            "merges": merges,
        },
    }
    path.write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")
    return path


def byte_vocab():
    fwd = bijection_map().forward
    return {fwd[b]: b for b in range(256)}


class TestLoad:
    def test_minimal_byte_fixture(self, tmp_path):
        path = write_minimal(tmp_path / "t.json", byte_vocab(), [])
        model = load_tokenizer(path)
        assert model.size == 256
        assert model.merges == []
        assert all(i >= 0 for i in model.byte_fallback_ids)

    def test_closure_violation_raises(self, tmp_path):
        vocab = byte_vocab()
        path = write_minimal(tmp_path / "t.json", vocab, [["a", "b"]])
        with pytest.raises(ClosureError):
            load_tokenizer(path)

    def test_duplicate_id_raises(self, tmp_path):
        vocab = byte_vocab()
        vocab["dup"] = 0
        path = write_minimal(tmp_path / "t.json", vocab, [])
        with pytest.raises(DuplicateIdError):
            load_tokenizer(path)

    def test_parse_failure(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(TokenizerFormatError):
            load_tokenizer(bad)

    def test_missing_bpe_section(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({"model": {"type": "Unigram"}}), encoding="utf-8")
        with pytest.raises(TokenizerFormatError):
            load_tokenizer(path)

    def test_string_merge_format_tolerated(self, tmp_path):
        vocab = byte_vocab()
        vocab["ab"] = 256
        path = write_minimal(tmp_path / "t.json", vocab, ["a b"])
        model = load_tokenizer(path)
        assert model.merges == [("a", "b")]

    def test_pair_merge_format_tolerated(self, tmp_path):
        vocab = byte_vocab()
        vocab["ab"] = 256
        path = write_minimal(tmp_path / "t.json", vocab, [["a", "b"]])
        assert load_tokenizer(path).merges == [("a", "b")]

    def test_duplicate_merges_retained_by_default(self, tmp_path):
        vocab = byte_vocab()
        vocab["ab"] = 256
        path = write_minimal(tmp_path / "t.json", vocab, [["a", "b"], ["a", "b"]])
        assert len(load_tokenizer(path).merges) == 2
        assert len(load_tokenizer(path, normalize_duplicate_merges=True).merges) == 1

    def test_pattern_read_from_split_pretokenizer(self, tmp_path):
        pre = {
            "type": "Sequence",
            "pretokenizers": [
                {"type": "Split", "pattern": {"Regex": r"\p{N}{1,3}|\S+|\s+"}, "behavior": "Isolated", "invert": False},
                {"type": "ByteLevel", "add_prefix_space": False, "use_regex": False},
            ],
        }
        path = write_minimal(tmp_path / "t.json", byte_vocab(), [], pre_tokenizer=pre)
        model = load_tokenizer(path)
        assert model.pretokenizer_pattern == r"\p{N}{1,3}|\S+|\s+"
        assert model.byte_level

    def test_added_token_mirrored_in_vocab_deduped(self, tmp_path):
        vocab = byte_vocab()
        vocab["<|x|>"] = 256
        path = write_minimal(
            tmp_path / "t.json",
            vocab,
            [],
            added=[{"id": 256, "content": "<|x|>", "special": True}],
        )
        model = load_tokenizer(path)
        assert model.size == 257
        assert "<|x|>" not in model.vocab
        assert model.special_tokens[0].surface == "<|x|>"


class TestSaveRoundTrip:
    def test_byte_fixture_round_trip(self, tmp_path, byte_model):
        path = tmp_path / "t.json"
        save_tokenizer(byte_model, path)
        again = load_tokenizer(path)
        assert again.vocab == byte_model.vocab
        assert again.merges == byte_model.merges
        assert again.ignore_merges == byte_model.ignore_merges

    def test_base_model_round_trip_field_by_field(self, tmp_path, base):
        path = tmp_path / "t.json"
        save_tokenizer(base, path)
        again = load_tokenizer(path)
        assert again.vocab == base.vocab
        assert again.merges == base.merges
        assert again.ignore_merges == base.ignore_merges
        assert again.pretokenizer_pattern == base.pretokenizer_pattern
        assert again.byte_level == base.byte_level
        assert [(s.surface, s.id) for s in again.special_tokens] == [
            (s.surface, s.id) for s in base.special_tokens
        ]

    def test_single_special_appears_in_added_tokens(self, tmp_path):
        model = make_model(specials=["<|only|>"])
        path = tmp_path / "t.json"
        save_tokenizer(model, path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        assert len(raw["added_tokens"]) == 1
        assert raw["added_tokens"][0]["content"] == "<|only|>"

    def test_saved_vocab_sorted_by_id(self, tmp_path, base):
        path = tmp_path / "t.json"
        save_tokenizer(base, path)
        raw = json.loads(path.read_text(encoding="utf-8"))
        ids = list(raw["model"]["vocab"].values())
        assert ids == sorted(ids)


class TestValidate:
    def test_valid_fixture_empty_report(self, base):
        assert validate_model(base).ok

    def test_duplicate_id_finding(self):
        model = make_model()
        broken = model.replace(vocab={**model.vocab, "clone": 0})
        report = validate_model(broken)
        assert report.by_check("duplicate-id")

    def test_density_finding(self):
        model = make_model(specials=())
        vocab = dict(model.vocab)
        symbols_z = max(vocab, key=vocab.get)
        vocab[symbols_z] = 1000  # punch a hole in the ID space
        report = validate_model(model.replace(vocab=vocab))
        assert report.by_check("id-density")

    def test_declared_size_mismatch_is_finding_not_error(self):
        model = make_model().replace(declared_size=9999)
        report = validate_model(model)
        assert report.by_check("declared-size")

    def test_missing_byte_token_finding(self):
        model = make_model(specials=())
        vocab = dict(model.vocab)
        del vocab["a"]
        # re-densify so only the byte-fallback finding remains
        vocab = {tok: i for i, (tok, _old) in enumerate(sorted(vocab.items(), key=lambda kv: kv[1]))}
        report = validate_model(model.replace(vocab=vocab))
        assert report.by_check("byte-fallback")

    def test_special_overlap_finding(self):
        model = make_model()
        overlapped = model.replace(
            special_tokens=model.special_tokens
            + [SpecialToken(surface="a", id=model.size)]
        )
        report = validate_model(overlapped)
        assert report.by_check("special-overlap")

    def test_merge_closure_finding(self):
        s = text_to_symbols
        model = make_model(merges=[(s("a"), s("b"))])
        vocab = {tok: i for tok, i in model.vocab.items() if tok != s("ab")}
        vocab = {tok: i for i, (tok, _old) in enumerate(sorted(vocab.items(), key=lambda kv: kv[1]))}
        report = validate_model(model.replace(vocab=vocab))
        assert report.by_check("merge-closure")


class TestVocabDiff:
    def test_balanced_diff_passes(self):
        diff = VocabDiff(removed={"x", "y"}, added=[("a", "word-level"), ("b", "numeral")])
        diff.check()

    def test_overlap_rejected(self):
        diff = VocabDiff(removed={"a"}, added=[("a", "word-level")])
        with pytest.raises(ValueError):
            diff.check()

    def test_unbalanced_rejected(self):
        diff = VocabDiff(removed={"x"}, added=[("a", "word-level"), ("b", "numeral")])
        with pytest.raises(ValueError):
            diff.check()

    def test_unknown_category_rejected(self):
        diff = VocabDiff(removed={"x"}, added=[("a", "mystery")])
        with pytest.raises(ValueError):
            diff.check()
