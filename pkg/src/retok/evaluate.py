"""Compression evaluation: fertility, bytes-per-token, volume, merge traces.

Words are maximal non-whitespace runs and the same splitter is shared by
every tokenizer in a comparison, so fertility numbers are comparable.
Character counts are Unicode scalar counts, not bytes. All aggregation is
exact integer bookkeeping; ratios are computed at the end.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path

from .bpe import encode, token_byte_length
from .model import TokenizerModel

# Regime cutoffs. The byte-fallback regime runs 3+ tokens per character and
# the whole-word regime 1-2 tokens per word; the declared constants split
# the ranges. Both are overridable through the pipeline config.
REGIME_BYTE_FALLBACK_TOKENS_PER_CHAR = 2.5
REGIME_WHOLE_WORD_TOKENS_PER_WORD = 2.0


def word_count(text: str) -> int:
    """Whitespace-delimited word count; punctuation attaches to words."""
    return len(text.split())


def load_manifest(path: str | Path) -> dict[str, list[str]]:
    """Read a corpus manifest: {name: [file, ...]} of UTF-8 text files."""
    path = Path(path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    corpora: dict[str, list[str]] = {}
    for name, files in raw.items():
        texts = []
        if isinstance(files, str):
            files = [files]
        for f in files:
            fp = Path(f)
            if not fp.is_absolute():
                fp = path.parent / fp
            texts.extend(
                line for line in fp.read_text(encoding="utf-8").splitlines() if line
            )
        corpora[name] = texts
    return corpora


@dataclass
class FertilityRow:
    tokenizer: str
    language: str
    tokens: int
    words: int

    @property
    def fertility(self) -> float:
        return self.tokens / self.words if self.words else 0.0


def fertility(
    models: dict[str, TokenizerModel], corpora: dict[str, list[str]]
) -> list[FertilityRow]:
    """Tokens per word, per (tokenizer, language); empty corpora are errors."""
    rows = []
    for lang, texts in corpora.items():
        words = sum(word_count(t) for t in texts)
        if words == 0:
            raise ValueError(f"language corpus {lang!r} contains no words")
        for name, model in models.items():
            tokens = sum(len(encode(model, t)) for t in texts)
            rows.append(FertilityRow(name, lang, tokens, words))
    return rows


def mean_fertility(rows: list[FertilityRow]) -> dict[str, float]:
    """Mean per-language fertility per tokenizer, ranked ascending."""
    per_tok: dict[str, list[float]] = {}
    for row in rows:
        per_tok.setdefault(row.tokenizer, []).append(row.fertility)
    means = {name: sum(v) / len(v) for name, v in per_tok.items()}
    return dict(sorted(means.items(), key=lambda kv: kv[1]))


@dataclass
class CompressionRow:
    tokenizer: str
    corpus_class: str
    utf8_bytes: int
    tokens: int
    chars: int

    @property
    def bytes_per_token(self) -> float:
        return self.utf8_bytes / self.tokens if self.tokens else 0.0

    @property
    def tokens_per_char(self) -> float:
        return self.tokens / self.chars if self.chars else 0.0


def bytes_per_token(
    models: dict[str, TokenizerModel], corpora: dict[str, list[str]]
) -> list[CompressionRow]:
    rows = []
    for cls, texts in corpora.items():
        nbytes = sum(len(t.encode("utf-8")) for t in texts)
        nchars = sum(len(t) for t in texts)
        for name, model in models.items():
            tokens = sum(len(encode(model, t)) for t in texts)
            rows.append(CompressionRow(name, cls, nbytes, tokens, nchars))
    return rows


@dataclass
class VolumeRow:
    language: str
    totals: dict[str, int]  # tokenizer -> token count

    def delta_pct(self, a: str, b: str) -> float:
        """Relative difference of B against A: (B - A) / A * 100."""
        base = self.totals[a]
        return 100.0 * (self.totals[b] - base) / base if base else 0.0


def token_volume(
    models: dict[str, TokenizerModel], corpora: dict[str, list[str]]
) -> list[VolumeRow]:
    """Per-language token totals plus a TOTAL row."""
    rows = []
    grand = {name: 0 for name in models}
    for lang, texts in corpora.items():
        totals = {}
        for name, model in models.items():
            totals[name] = sum(len(encode(model, t)) for t in texts)
            grand[name] += totals[name]
        rows.append(VolumeRow(lang, totals))
    rows.append(VolumeRow("TOTAL", grand))
    return rows


@dataclass
class MergeTrace:
    tokenizer: str
    total_tokens: int
    broken_characters: int
    character_count: int

    @property
    def percent_broken(self) -> float:
        return (
            100.0 * self.broken_characters / self.character_count
            if self.character_count
            else 0.0
        )


def merge_trace(models: dict[str, TokenizerModel], text: str) -> list[MergeTrace]:
    """Count characters whose UTF-8 bytes span two or more tokens."""
    traces = []
    for name, model in models.items():
        seq = encode(model, text)
        spans = []
        pos = 0
        for tid, surface in zip(seq.ids, seq.surfaces):
            if tid in model.special_by_id:
                width = len(surface.encode("utf-8"))
            else:
                width = token_byte_length(model, surface)
            spans.append((pos, pos + width))
            pos += width
        broken = 0
        offset = 0
        for ch in text:
            width = len(ch.encode("utf-8"))
            start, end = offset, offset + width
            covering = sum(1 for s, e in spans if s < end and e > start)
            if covering >= 2:
                broken += 1
            offset = end
        traces.append(MergeTrace(name, len(seq), broken, len(text)))
    return traces


def digit_grouping_check(model: TokenizerModel, digits: str = "1234567890") -> list[str]:
    """Decoded token texts for a digit run; the grouping signature."""
    seq = encode(model, digits)
    from .bytelevel import symbols_to_bytes

    return [
        symbols_to_bytes(s).decode("utf-8", errors="replace")
        if tid not in model.special_by_id
        else s
        for tid, s in zip(seq.ids, seq.surfaces)
    ]


def regime_classify(
    model: TokenizerModel,
    texts: list[str],
    byte_fallback_tokens_per_char: float = REGIME_BYTE_FALLBACK_TOKENS_PER_CHAR,
    whole_word_tokens_per_word: float = REGIME_WHOLE_WORD_TOKENS_PER_WORD,
) -> str:
    """Classify compression behavior: byte-fallback, subword, or whole-word."""
    tokens = sum(len(encode(model, t)) for t in texts)
    chars = sum(len(t) for t in texts)
    words = sum(word_count(t) for t in texts)
    if not chars or not words:
        raise ValueError("regime classification needs non-empty text")
    if tokens / chars >= byte_fallback_tokens_per_char:
        return "byte-fallback"
    if tokens / words <= whole_word_tokens_per_word:
        return "whole-word"
    return "subword"


# -- report rendering -------------------------------------------------------


def fertility_csv(rows: list[FertilityRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["tokenizer", "language", "tokens", "words", "fertility"])
    for r in rows:
        writer.writerow([r.tokenizer, r.language, r.tokens, r.words, f"{r.fertility:.6f}"])
    return buf.getvalue()


def compression_csv(rows: list[CompressionRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["tokenizer", "corpus_class", "utf8_bytes", "tokens", "bytes_per_token", "tokens_per_char"]
    )
    for r in rows:
        writer.writerow(
            [r.tokenizer, r.corpus_class, r.utf8_bytes, r.tokens,
             f"{r.bytes_per_token:.6f}", f"{r.tokens_per_char:.6f}"]
        )
    return buf.getvalue()


def volume_csv(rows: list[VolumeRow], baseline: str | None = None) -> str:
    names = sorted(rows[0].totals) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf)
    header = ["language"] + names
    if baseline:
        header += [f"delta_pct_vs_{baseline}:{n}" for n in names if n != baseline]
    writer.writerow(header)
    for r in rows:
        line = [r.language] + [r.totals[n] for n in names]
        if baseline:
            line += [
                f"{r.delta_pct(baseline, n):+.2f}" for n in names if n != baseline
            ]
        writer.writerow(line)
    return buf.getvalue()


def markdown_table(header: list[str], rows: list[list]) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(lines)
