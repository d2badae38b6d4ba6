"""Reviewer-runnable structural checks with PASS/FAIL verdicts.

Each check scans the model, counts violations, and renders a short
label-colon-value report ending in a PASS or FAIL line. A report passes
exactly when it found zero violations. The unified check applies the
byte-length and cross-script constraints across pre-tokenizer families:
byte-level vocabularies are profiled through the inverse bijection,
plain-text vocabularies on their raw text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .bpe import token_byte_length
from .model import TokenizerModel
from .scripts import ScriptTable, profile_token

DEFAULT_BYTE_CEILING = 32


@dataclass
class VerifyReport:
    check: str
    scanned: int
    violations: int
    samples: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    labels: dict[str, object] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "PASS" if self.violations == 0 else "FAIL"

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def render(self) -> str:
        lines = []
        for label, value in self.labels.items():
            lines.append(f"{label + ':':<22} {value:,}" if isinstance(value, int) else f"{label + ':':<22} {value}")
        for note in self.notes:
            lines.append(f"note: {note}")
        for sample in self.samples[:5]:
            lines.append(f"violation: {sample}")
        if self.passed:
            lines.append(f"PASS: {self.check}.")
        else:
            lines.append(f"FAIL: {self.check} ({self.violations} violations).")
        return "\n".join(lines)


def verify_no_cross_script_merges(
    model: TokenizerModel, table: ScriptTable
) -> VerifyReport:
    """Scan every merge rule's composed surface for disjoint-script mixing."""
    violations = []
    for left, right in model.merges:
        prof = profile_token(model, table, left + right)
        if prof.is_cross_script:
            violations.append(f"({left!r}, {right!r}) -> {sorted(prof.scripts)}")
    return VerifyReport(
        check="no cross-script entries in the merge list",
        scanned=len(model.merges),
        violations=len(violations),
        samples=violations,
        labels={
            "tokenizer": model.name,
            "merge-rule entries": len(model.merges),
            "cross-script": len(violations),
        },
    )


def verify_max_byte_length(
    model: TokenizerModel, ceiling: int = DEFAULT_BYTE_CEILING
) -> VerifyReport:
    """Confirm no normal vocabulary token exceeds the byte-length ceiling."""
    over = []
    for token in model.vocab:
        n = token_byte_length(model, token)
        if n > ceiling:
            over.append(f"{token!r} = {n} bytes")
    return VerifyReport(
        check=f"all {len(model.vocab):,} normal tokens within {ceiling} bytes",
        scanned=len(model.vocab),
        violations=len(over),
        samples=over,
        labels={
            "tokenizer": model.name,
            "vocab size": model.size,
            "max_bytes limit": ceiling,
            f"tokens > {ceiling} bytes": len(over),
        },
    )


def verify_structural_identity(
    model_a: TokenizerModel, model_b: TokenizerModel
) -> VerifyReport:
    """Byte-compare normal vocabularies and merge tables of two models.

    Differences confined to the special-token slots pass with notes; any
    normal-vocab or merge difference fails.
    """
    diffs: list[str] = []
    notes: list[str] = []
    if model_a.merges != model_b.merges:
        for i, (ma, mb) in enumerate(zip(model_a.merges, model_b.merges)):
            if ma != mb:
                diffs.append(f"merge rank {i}: {ma!r} != {mb!r}")
                break
        if len(model_a.merges) != len(model_b.merges):
            diffs.append(
                f"merge counts differ: {len(model_a.merges)} vs {len(model_b.merges)}"
            )
    if model_a.vocab != model_b.vocab:
        only_a = set(model_a.vocab) - set(model_b.vocab)
        only_b = set(model_b.vocab) - set(model_a.vocab)
        moved = {
            t
            for t in set(model_a.vocab) & set(model_b.vocab)
            if model_a.vocab[t] != model_b.vocab[t]
        }
        for t in sorted(only_a | only_b | moved)[:10]:
            diffs.append(f"normal vocab differs at {t!r}")
    specials_a = {(s.surface, s.id) for s in model_a.special_tokens}
    specials_b = {(s.surface, s.id) for s in model_b.special_tokens}
    if specials_a != specials_b:
        delta = specials_a ^ specials_b
        notes.append(f"{len(delta)} special-slot differences (allowed)")
    return VerifyReport(
        check="normal vocabulary and merge table identity",
        scanned=len(model_a.vocab) + len(model_a.merges),
        violations=len(diffs),
        samples=diffs,
        notes=notes,
        labels={
            "tokenizer A": model_a.name,
            "tokenizer B": model_b.name,
            "normal-vocab differences": len(diffs),
        },
    )


@dataclass
class UnifiedRow:
    name: str
    pretokenizer: str
    vocab: int
    max_byte: int
    over_ceiling: int
    cross_script: int

    @property
    def both_clean(self) -> bool:
        return self.over_ceiling == 0 and self.cross_script == 0


def verify_unified(
    models: list[TokenizerModel],
    table: ScriptTable,
    ceiling: int = DEFAULT_BYTE_CEILING,
) -> list[UnifiedRow]:
    """Apply the byte-length and cross-script checks across model families."""
    rows = []
    for model in models:
        max_byte = 0
        over = 0
        cross = 0
        for token in model.vocab:
            n = token_byte_length(model, token)
            max_byte = max(max_byte, n)
            if n > ceiling:
                over += 1
            if profile_token(model, table, token).is_cross_script:
                cross += 1
        rows.append(
            UnifiedRow(
                name=model.name,
                pretokenizer="ByteLevel" if model.byte_level else "plain",
                vocab=model.size,
                max_byte=max_byte,
                over_ceiling=over,
                cross_script=cross,
            )
        )
    return rows


def render_unified(rows: list[UnifiedRow], ceiling: int = DEFAULT_BYTE_CEILING) -> str:
    header = (
        f"{'tokenizer':<28} {'pre-tok':<10} {'vocab':>8} {'max byte':>9} "
        f"{'>'+str(ceiling)+' B':>7} {'cross':>6}  both clean?"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.name:<28} {r.pretokenizer:<10} {r.vocab:>8,} {r.max_byte:>9} "
            f"{r.over_ceiling:>7} {r.cross_script:>6}  {'Yes' if r.both_clean else 'No'}"
        )
    return "\n".join(lines)


def save_unified(rows: list[UnifiedRow], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            [dict(r.__dict__, both_clean=r.both_clean) for r in rows], indent=1
        ),
        encoding="utf-8",
    )
