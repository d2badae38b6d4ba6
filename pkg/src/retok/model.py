"""In-memory representation of a byte-level BPE tokenizer plus JSON load/save.

The on-disk format is the HuggingFace ``tokenizer.json`` schema restricted to
``model.type == "BPE"``: a ``model.vocab`` map, an ordered ``model.merges``
list (position = rank, lower fires first), an ``ignore_merges`` flag, an
``added_tokens`` list for special tokens, and a ``pre_tokenizer`` section.
The reader tolerates both ``"left right"`` single-string merges and
two-element ``["left", "right"]`` pairs.

Models are treated as immutable after construction: crop, surgery and
permutation all build new models rather than mutating in place, so a loaded
model can be shared freely across parallel workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .bytelevel import bijection_map

# Classic GPT-2 segmentation regex, used for synthetic models and as the
# fallback when a file's ByteLevel pre-tokenizer carries no explicit pattern.
GPT2_SPLIT_PATTERN = (
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"""
)

# Variant keeping combining marks inside letter runs, so abugida words
# (letter + dependent vowel sequences) form single pretokens. The classic
# pattern would split every Brahmic word at its first matra.
MARK_AWARE_SPLIT_PATTERN = (
    r"""'s|'t|'re|'ve|'m|'ll|'d| ?[\p{L}\p{M}]+| ?\p{N}+|"""
    r""" ?[^\s\p{L}\p{M}\p{N}]+|\s+(?!\S)|\s+"""
)


class TokenizerFormatError(ValueError):
    """The file does not parse as a BPE tokenizer definition."""


class ClosureError(TokenizerFormatError):
    """A merge rule references a token absent from the vocabulary."""


class DuplicateIdError(TokenizerFormatError):
    """Two entries claim the same token ID."""


@dataclass(frozen=True)
class SpecialToken:
    surface: str
    id: int
    pinned: bool = True
    special: bool = True


@dataclass
class ValidationFinding:
    check: str
    message: str
    entries: list = field(default_factory=list)


@dataclass
class ValidationReport:
    findings: list[ValidationFinding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, check: str, message: str, entries=()) -> None:
        self.findings.append(ValidationFinding(check, message, list(entries)))

    def by_check(self, check: str) -> list[ValidationFinding]:
        return [f for f in self.findings if f.check == check]


@dataclass
class TokenizerModel:
    """A byte-level BPE tokenizer: vocabulary, ranked merges, specials."""

    vocab: dict[str, int]
    merges: list[tuple[str, str]]
    ignore_merges: bool = True
    special_tokens: list[SpecialToken] = field(default_factory=list)
    pretokenizer_pattern: str | None = GPT2_SPLIT_PATTERN
    byte_level: bool = True
    declared_size: int | None = None
    name: str = "tokenizer"
    # Raw file sections carried through save() for faithful round-trips.
    raw_pre_tokenizer: dict | None = field(default=None, repr=False)
    raw_decoder: dict | None = field(default=None, repr=False)
    _caches: dict = field(default_factory=dict, repr=False, compare=False)

    # -- derived views ----------------------------------------------------

    @property
    def size(self) -> int:
        """Number of distinct token IDs (normal vocabulary plus specials)."""
        return len(self.vocab) + len(self.special_tokens)

    @property
    def merge_ranks(self) -> dict[tuple[str, str], int]:
        """Pair -> rank map; on duplicate entries the earliest rank wins."""
        ranks = self._caches.get("merge_ranks")
        if ranks is None:
            ranks = {}
            for rank, pair in enumerate(self.merges):
                ranks.setdefault(pair, rank)
            self._caches["merge_ranks"] = ranks
        return ranks

    @property
    def id_to_token(self) -> dict[int, str]:
        """ID -> surface for normal tokens only."""
        rev = self._caches.get("id_to_token")
        if rev is None:
            rev = {i: tok for tok, i in self.vocab.items()}
            self._caches["id_to_token"] = rev
        return rev

    @property
    def special_by_id(self) -> dict[int, SpecialToken]:
        sp = self._caches.get("special_by_id")
        if sp is None:
            sp = {s.id: s for s in self.special_tokens}
            self._caches["special_by_id"] = sp
        return sp

    @property
    def byte_fallback_ids(self) -> list[int]:
        """IDs of the 256 single-byte tokens, indexed by byte value.

        Missing byte tokens appear as -1; validate_model reports them.
        """
        ids = self._caches.get("byte_fallback_ids")
        if ids is None:
            fwd = bijection_map().forward
            ids = [self.vocab.get(fwd[b], -1) for b in range(256)]
            self._caches["byte_fallback_ids"] = ids
        return ids

    def replace(self, **changes) -> "TokenizerModel":
        """Build a new model with the given fields swapped out."""
        base = dict(
            vocab=self.vocab,
            merges=self.merges,
            ignore_merges=self.ignore_merges,
            special_tokens=self.special_tokens,
            pretokenizer_pattern=self.pretokenizer_pattern,
            byte_level=self.byte_level,
            declared_size=self.declared_size,
            name=self.name,
            raw_pre_tokenizer=self.raw_pre_tokenizer,
            raw_decoder=self.raw_decoder,
        )
        base.update(changes)
        return TokenizerModel(**base)


@dataclass
class VocabDiff:
    """Slot-level difference between two models: removals and typed additions."""

    removed: set[str]
    added: list[tuple[str, str]]  # (token, category)

    CATEGORIES = (
        "char-infra",
        "word-level",
        "single-script",
        "numeral",
        "punctuation",
        "artifact",
    )

    def check(self, budget_preserving: bool = True) -> None:
        added_strings = {tok for tok, _ in self.added}
        if self.removed & added_strings:
            raise ValueError("removed and added token sets overlap")
        for tok, cat in self.added:
            if cat not in self.CATEGORIES:
                raise ValueError(f"unknown addition category {cat!r} for {tok!r}")
        if budget_preserving and len(self.removed) != len(self.added):
            raise ValueError(
                f"not budget preserving: {len(self.removed)} removed vs "
                f"{len(self.added)} added"
            )


# -- pre-tokenizer helpers ------------------------------------------------


def _extract_pattern(pre_tok: dict | None) -> tuple[str | None, bool]:
    """Pull (split regex, is_byte_level) out of a pre_tokenizer section."""
    if pre_tok is None:
        return None, False
    kind = pre_tok.get("type")
    if kind == "Sequence":
        pattern = None
        byte_level = False
        for sub in pre_tok.get("pretokenizers", []):
            sub_pattern, sub_bl = _extract_pattern(sub)
            pattern = pattern or sub_pattern
            byte_level = byte_level or sub_bl
        return pattern, byte_level
    if kind == "Split":
        pat = pre_tok.get("pattern", {})
        if isinstance(pat, dict):
            return pat.get("Regex") or pat.get("String"), False
        return str(pat), False
    if kind == "ByteLevel":
        # use_regex means the GPT-2 pattern is applied internally.
        if pre_tok.get("use_regex", True):
            return GPT2_SPLIT_PATTERN, True
        return None, True
    return None, False


def _default_pre_tokenizer(pattern: str | None, byte_level: bool) -> dict:
    parts = []
    if pattern:
        parts.append(
            {
                "type": "Split",
                "pattern": {"Regex": pattern},
                "behavior": "Isolated",
                "invert": False,
            }
        )
    if byte_level:
        parts.append(
            {
                "type": "ByteLevel",
                "add_prefix_space": False,
                "trim_offsets": True,
                "use_regex": False,
            }
        )
    if len(parts) == 1:
        return parts[0]
    return {"type": "Sequence", "pretokenizers": parts}


# -- load / save ----------------------------------------------------------


def _parse_merges(raw_merges) -> list[tuple[str, str]]:
    merges: list[tuple[str, str]] = []
    for entry in raw_merges:
        if isinstance(entry, str):
            parts = entry.split(" ")
            if len(parts) != 2:
                raise TokenizerFormatError(
                    f"merge entry {entry!r} is not a 'left right' pair"
                )
            merges.append((parts[0], parts[1]))
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            merges.append((str(entry[0]), str(entry[1])))
        else:
            raise TokenizerFormatError(f"unparseable merge entry: {entry!r}")
    return merges


def load_tokenizer(
    path: str | Path,
    *,
    normalize_duplicate_merges: bool = False,
    pinned_specials: bool = True,
) -> TokenizerModel:
    """Load a tokenizer definition file.

    Duplicate merge entries (possible in converted files) are retained
    verbatim unless ``normalize_duplicate_merges`` is set; bit-faithful
    round-trip is the default contract. Special tokens get the given
    ``pinned_specials`` flag, since pinning is runtime policy and not part
    of the file schema.

    Raises TokenizerFormatError (or a subclass) on parse failure, merge
    closure violations, or duplicate IDs. A declared-size mismatch is a
    validation finding, not a load error.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise TokenizerFormatError(f"cannot parse {path}: {exc}") from exc

    model_section = raw.get("model")
    if not isinstance(model_section, dict) or model_section.get("type") != "BPE":
        raise TokenizerFormatError(f"{path}: missing BPE model section")

    vocab = {str(tok): int(i) for tok, i in model_section.get("vocab", {}).items()}
    merges = _parse_merges(model_section.get("merges", []))
    if normalize_duplicate_merges:
        seen: set[tuple[str, str]] = set()
        deduped = []
        for pair in merges:
            if pair not in seen:
                seen.add(pair)
                deduped.append(pair)
        merges = deduped

    specials: list[SpecialToken] = []
    for entry in raw.get("added_tokens", []):
        specials.append(
            SpecialToken(
                surface=str(entry["content"]),
                id=int(entry["id"]),
                pinned=pinned_specials,
                special=bool(entry.get("special", True)),
            )
        )
    # An added token may be mirrored inside model.vocab under the same ID;
    # keep it only on the specials side.
    for sp in specials:
        if vocab.get(sp.surface) == sp.id:
            del vocab[sp.surface]

    ids = list(vocab.values()) + [s.id for s in specials]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicateIdError(f"{path}: duplicate token IDs {dupes[:10]}")

    for left, right in merges:
        if left not in vocab or right not in vocab or (left + right) not in vocab:
            raise ClosureError(
                f"{path}: merge ({left!r}, {right!r}) references tokens "
                "absent from the vocabulary"
            )

    pre_tok = raw.get("pre_tokenizer")
    pattern, byte_level = _extract_pattern(pre_tok)
    if pre_tok is None:
        # Synthetic fixtures: assume the byte-level default.
        pattern, byte_level = GPT2_SPLIT_PATTERN, True

    declared = model_section.get("vocab_size")
    return TokenizerModel(
        vocab=vocab,
        merges=merges,
        ignore_merges=bool(model_section.get("ignore_merges", False)),
        special_tokens=specials,
        pretokenizer_pattern=pattern,
        byte_level=byte_level,
        declared_size=int(declared) if declared is not None else None,
        name=path.stem,
        raw_pre_tokenizer=pre_tok,
        raw_decoder=raw.get("decoder"),
    )


def save_tokenizer(model: TokenizerModel, path: str | Path) -> None:
    """Write *model* in the tokenizer-definition JSON schema."""
    path = Path(path)
    added = [
        {
            "id": sp.id,
            "content": sp.surface,
            "single_word": False,
            "lstrip": False,
            "rstrip": False,
            "normalized": False,
            "special": sp.special,
        }
        for sp in sorted(model.special_tokens, key=lambda s: s.id)
    ]
    pre_tok = model.raw_pre_tokenizer or _default_pre_tokenizer(
        model.pretokenizer_pattern, model.byte_level
    )
    decoder = model.raw_decoder
    if decoder is None and model.byte_level:
        decoder = {"type": "ByteLevel", "add_prefix_space": True, "trim_offsets": True, "use_regex": True}
    payload = {
        "version": "1.0",
        "truncation": None,
        "padding": None,
        "added_tokens": added,
        "normalizer": None,
        "pre_tokenizer": pre_tok,
        "post_processor": None,
        "decoder": decoder,
        "model": {
            "type": "BPE",
            "dropout": None,
            "unk_token": None,
            "continuing_subword_prefix": None,
            "end_of_word_suffix": None,
            "fuse_unk": False,
            "byte_fallback": False,
            "ignore_merges": model.ignore_merges,
            "vocab": dict(sorted(model.vocab.items(), key=lambda kv: kv[1])),
            "merges": [[left, right] for left, right in model.merges],
        },
    }
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
    )


def validate_model(model: TokenizerModel) -> ValidationReport:
    """Check every structural invariant; returns findings, never raises."""
    report = ValidationReport()

    ids = [(tok, i) for tok, i in model.vocab.items()]
    ids += [(sp.surface, sp.id) for sp in model.special_tokens]
    seen: dict[int, str] = {}
    for tok, i in ids:
        if i in seen:
            report.add("duplicate-id", f"ID {i} used by {seen[i]!r} and {tok!r}", [i])
        seen[i] = tok

    id_values = sorted(seen)
    if id_values and (id_values[0] != 0 or id_values[-1] != len(id_values) - 1):
        missing = sorted(set(range(len(id_values))) - set(id_values))
        report.add(
            "id-density",
            f"IDs not dense in [0, {len(id_values)}): first gaps {missing[:10]}",
            missing[:10],
        )

    for left, right in model.merges:
        missing = [t for t in (left, right, left + right) if t not in model.vocab]
        if missing:
            report.add(
                "merge-closure",
                f"merge ({left!r}, {right!r}) references absent tokens",
                missing,
            )

    if model.byte_level:
        absent = [b for b, i in enumerate(model.byte_fallback_ids) if i < 0]
        if absent:
            report.add(
                "byte-fallback",
                f"{len(absent)} single-byte tokens missing",
                absent[:16],
            )

    normal = set(model.vocab)
    for sp in model.special_tokens:
        if sp.surface in normal:
            report.add(
                "special-overlap",
                f"special surface {sp.surface!r} duplicates a normal token",
                [sp.surface],
            )

    if model.declared_size is not None and model.declared_size != model.size:
        report.add(
            "declared-size",
            f"declared vocab size {model.declared_size} != actual {model.size}",
        )

    return report
