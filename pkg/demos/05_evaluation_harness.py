"""
The compression-evaluation harness
==================================

Fertility (tokens per word), bytes per token, token-volume deltas,
digit grouping, and regime classification, comparing the synthetic base
against its pipeline retrofit. All bookkeeping is exact integer counts.
"""

import tempfile
from pathlib import Path

from retok import load_tokenizer
from retok.cli import main
from retok.evaluate import (
    bytes_per_token,
    digit_grouping_check,
    fertility,
    mean_fertility,
    regime_classify,
    token_volume,
)
from retok.pipeline import PipelineConfig, run_pipeline
from retok.synthetic import fertility_fixture

workdir = Path(tempfile.mkdtemp(prefix="eval-demo-"))
assert main(["--out", str(workdir), "synth", "--allocation-budget", "24"]) == 0
outcome = run_pipeline(PipelineConfig.from_file(workdir / "config.json"))
models = {
    "base": load_tokenizer(workdir / "base.json"),
    "final": outcome.final_model,
}
corpora = fertility_fixture()

# Per-word fertility, same whitespace splitter for every tokenizer.
rows = fertility(models, corpora)
print(f"{'tokenizer':<8} {'lang':<4} {'tokens':>6} {'words':>6} {'fertility':>9}")
for row in rows:
    print(f"{row.tokenizer:<8} {row.language:<4} {row.tokens:>6} "
          f"{row.words:>6} {row.fertility:>9.3f}")
print("mean fertility ranking:", mean_fertility(rows))

# Bytes per token: how much input each token carries. Higher is better.
print(f"\n{'tokenizer':<8} {'class':<4} {'bytes':>6} {'tokens':>6} {'B/tok':>6}")
for row in bytes_per_token(models, corpora):
    print(f"{row.tokenizer:<8} {row.corpus_class:<4} {row.utf8_bytes:>6} "
          f"{row.tokens:>6} {row.bytes_per_token:>6.2f}")

# Token volume with the paper-style sign convention: (B - A) / A.
print(f"\n{'lang':<6} {'base':>6} {'final':>6} {'delta':>8}")
for row in token_volume(models, corpora):
    delta = row.delta_pct("base", "final")
    print(f"{row.language:<6} {row.totals['base']:>6} {row.totals['final']:>6} "
          f"{delta:>+7.2f}%")

# Digit grouping signature: the synthetic base has no digit merges, so ten
# digits cost ten tokens; the surgery never touches inherited digits.
print("\ndigit grouping:", digit_grouping_check(models["final"]))

# Regime classification per language: Odia moves out of byte fallback.
print(f"\n{'tokenizer':<8} {'lang':<4} regime")
for name, model in models.items():
    for lang, texts in corpora.items():
        print(f"{name:<8} {lang:<4} {regime_classify(model, texts)}")
