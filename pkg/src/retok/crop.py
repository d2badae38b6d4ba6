"""Script-prune crop: drop tokens of out-of-scope scripts down to an exact budget.

The crop removes every token whose decoded bytes touch a prune script, then
(if still above budget) removes the lowest-fire-rate filler tokens until the
model is exactly the target size. Byte-fallback tokens and special tokens are
never removable. Merge closure is repaired by dropping any rule whose left,
right, or composed token was removed; surviving IDs are compacted densely in
old-ID order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

from .model import TokenizerModel, SpecialToken
from .scripts import ScriptTable, profile_token

if TYPE_CHECKING:  # pragma: no cover
    from .audit import FireCounts


class CropBudgetError(ValueError):
    """The target budget cannot be reached exactly."""


@dataclass
class CropPlan:
    prune_scripts: set[str]
    target_budget: int
    script_removed: dict[str, int]
    script_tokens: dict[str, list[str]] = field(repr=False, default_factory=dict)
    filler_removed: list[str] = field(default_factory=list)
    resulting_size: int = 0

    @property
    def removed_tokens(self) -> set[str]:
        out: set[str] = set(self.filler_removed)
        for toks in self.script_tokens.values():
            out.update(toks)
        return out

    def to_json(self) -> str:
        return json.dumps(
            {
                "prune_scripts": sorted(self.prune_scripts),
                "target_budget": self.target_budget,
                "script_removed": dict(
                    sorted(self.script_removed.items(), key=lambda kv: -kv[1])
                ),
                "script_removed_total": sum(self.script_removed.values()),
                "filler_removed": len(self.filler_removed),
                "resulting_size": self.resulting_size,
            },
            ensure_ascii=False,
            indent=1,
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


def plan_crop(
    model: TokenizerModel,
    table: ScriptTable,
    prune_scripts: set[str],
    target_budget: int,
    fires: "FireCounts | None" = None,
) -> CropPlan:
    """Decide which tokens to remove to land exactly on *target_budget*.

    A token matches when its profile touches any prune class; each match is
    attributed to the class of its first script-bearing code point. Filler
    removal (lowest fire rate first, stable ID tie-break) requires *fires*.
    """
    if target_budget > model.size:
        raise CropBudgetError(
            f"target budget {target_budget} exceeds model size {model.size}"
        )
    prune_scripts = {table.script_class(s) for s in prune_scripts}
    byte_ids = set(model.byte_fallback_ids)
    byte_tokens = {tok for tok, i in model.vocab.items() if i in byte_ids}

    script_tokens: dict[str, list[str]] = {cls: [] for cls in sorted(prune_scripts)}
    for token in model.vocab:
        if token in byte_tokens:
            continue
        prof = profile_token(model, table, token)
        hit = prof.scripts & prune_scripts
        if not hit:
            continue
        if len(hit) == 1:
            cls = next(iter(hit))
        else:
            # Attribute to the first prune-class code point in the token.
            cls = None
            for cp in prof.codepoints:
                c = table.classify_class(cp)
                if c in hit:
                    cls = c
                    break
            cls = cls or sorted(hit)[0]
        script_tokens[cls].append(token)

    removed = {tok for toks in script_tokens.values() for tok in toks}
    size_after = model.size - len(removed)
    if size_after < target_budget:
        raise CropBudgetError(
            f"script matches alone remove {len(removed)} tokens, "
            f"undershooting budget {target_budget} (size {size_after})"
        )

    filler: list[str] = []
    if size_after > target_budget:
        need = size_after - target_budget
        if fires is None:
            raise CropBudgetError(
                f"{need} filler removals needed but no fire counts supplied"
            )
        candidates = [
            (fires.counts[i], i, tok)
            for tok, i in model.vocab.items()
            if tok not in removed and tok not in byte_tokens
        ]
        candidates.sort(key=lambda c: (c[0], c[1]))
        if len(candidates) < need:
            raise CropBudgetError(
                f"only {len(candidates)} removable tokens for {need} filler slots"
            )
        filler = [tok for _count, _i, tok in candidates[:need]]

    return CropPlan(
        prune_scripts=prune_scripts,
        target_budget=target_budget,
        script_removed={cls: len(toks) for cls, toks in script_tokens.items()},
        script_tokens=script_tokens,
        filler_removed=filler,
        resulting_size=target_budget,
    )


def apply_crop(model: TokenizerModel, plan: CropPlan) -> TokenizerModel:
    """Execute a plan: new model of exactly the target size, closure repaired."""
    removed = plan.removed_tokens
    missing = [t for t in removed if t not in model.vocab]
    if missing:
        raise ValueError(f"plan does not match model: {missing[:5]!r} absent")

    survivors = {tok: i for tok, i in model.vocab.items() if tok not in removed}
    merges = [
        (left, right)
        for left, right in model.merges
        if left in survivors and right in survivors and (left + right) in survivors
    ]

    # Compact IDs densely, preserving old-ID order across normals + specials.
    ordered: list[tuple[int, str, SpecialToken | None]] = [
        (i, tok, None) for tok, i in survivors.items()
    ]
    ordered += [(sp.id, sp.surface, sp) for sp in model.special_tokens]
    ordered.sort(key=lambda entry: entry[0])
    new_vocab: dict[str, int] = {}
    new_specials: list[SpecialToken] = []
    for new_id, (_old, tok, sp) in enumerate(ordered):
        if sp is None:
            new_vocab[tok] = new_id
        else:
            new_specials.append(
                SpecialToken(surface=sp.surface, id=new_id, pinned=sp.pinned, special=sp.special)
            )

    out = model.replace(
        vocab=new_vocab,
        merges=merges,
        special_tokens=new_specials,
        declared_size=plan.target_budget,
        name=f"{model.name}-cropped",
    )
    if out.size != plan.target_budget:
        raise CropBudgetError(
            f"crop produced {out.size} tokens, expected {plan.target_budget}"
        )
    return out
