"""
Stage 1: the script-prune crop
==============================

Removes every token touching an out-of-scope script, tops up with
lowest-fire-rate filler to land on an exact budget, and repairs merge
closure. Byte-fallback tokens are never removable, so encoding stays
total: pruned-script text simply falls back to bytes.
"""

from retok import (
    apply_crop,
    count_fires,
    default_table,
    encode,
    plan_crop,
    profile_token,
    validate_model,
)
from retok.synthetic import audit_corpus, base_model

model = base_model()
table = default_table()

# How many removable tokens touch the prune targets? Byte tokens are
# excluded: a bare lead byte like 0xE5 profiles as CJK (nothing else uses
# that code-point range) but the 256-byte floor is never removable.
prune = {"cjk", "hangul"}
byte_ids = set(model.byte_fallback_ids)
matches = [
    tok for tok, tid in model.vocab.items()
    if tid not in byte_ids and profile_token(model, table, tok).scripts & prune
]
print(f"{len(matches)} of {model.size} tokens touch {sorted(prune)}")

# An exact-budget plan: script matches first, filler only if still above
# budget (filler ranking needs fire counts, measured on the base model).
fires = count_fires(model, audit_corpus())
budget = model.size - len(matches)
plan = plan_crop(model, table, prune, budget, fires)
print("\nper-script removals (the crop report):")
for script, n in sorted(plan.script_removed.items(), key=lambda kv: -kv[1]):
    print(f"  {script:<10} {n}")
print(f"  filler     {len(plan.filler_removed)}")

cropped = apply_crop(model, plan)
print(f"\ncropped: {cropped.size} tokens (budget {budget}), "
      f"{len(cropped.merges)} merge rules "
      f"({len(model.merges) - len(cropped.merges)} dropped by closure repair)")
print("validation findings:", len(validate_model(cropped).findings))

# Encoding of text in kept scripts is unchanged when no removed token fired.
for text in ("the people speak", "भारत एक देश है।"):
    assert encode(model, text).surfaces == encode(cropped, text).surfaces
print("\nkept-script encodings unchanged")

# Pruned-script text now costs 3 tokens per character: byte-fallback regime.
sample = "你好"
print(f"encode('{sample}') after crop -> {len(encode(cropped, sample))} tokens "
      f"for {len(sample)} characters")

# Cropping to a tighter budget engages the filler stage.
tighter = plan_crop(model, table, prune, budget - 5, fires)
print(f"\nbudget {budget - 5}: {sum(tighter.script_removed.values())} script "
      f"removals + {len(tighter.filler_removed)} lowest-fire filler tokens")
print("filler picks:", [repr(t) for t in tighter.filler_removed])
