"""Config-driven orchestration of the full retrofit pipeline.

Stages: crop to budget, fire-rate audit, dead-slot report, per-script
candidate training, slot allocation, surgery, frequency permutation, and
final verification. Every stage writes its artifact into the output
directory; identical config and inputs produce byte-identical artifacts
regardless of worker count.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .allocation import (
    AllocationProblem,
    AllocationResult,
    allocate,
    build_curve,
    compare_policies,
    policies_csv,
)
from .audit import count_fires, find_dead_slots, read_corpus, run_audit_suite
from .crop import apply_crop, plan_crop
from .model import TokenizerModel, load_tokenizer, save_tokenizer, validate_model
from .scripts import ScriptTable, default_table, profile_token
from .surgery import (
    InsufficientDeadSlotsError,
    apply_surgery,
    assemble_plan,
    filter_cross_script,
    permute_ids,
    removable_dead_tokens,
    train_candidates,
)
from .verify import (
    render_unified,
    save_unified,
    verify_max_byte_length,
    verify_no_cross_script_merges,
    verify_unified,
)

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    tokenizer: str
    corpus: str
    prune_scripts: list[str]
    target_budget: int
    target_scripts: list[str]
    allocation_budget: int
    allocation_policy: str = "greedy"
    floor_per_billion: float = 1000.0
    policy_scripts: list[str] | None = None
    max_candidates: int = 64
    word_list: str | None = None
    numerals: list[str] = field(default_factory=list)
    punctuation: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    script_table: str | None = None
    byte_ceiling: int = 32
    regime_byte_fallback_tokens_per_char: float = 2.5
    regime_whole_word_tokens_per_word: float = 2.0
    out_dir: str = "out"
    jobs: int = 1
    version: int = CONFIG_VERSION

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"tokenizer", "corpus", "prune_scripts", "target_budget",
                   "target_scripts", "allocation_budget"} - set(raw)
        if missing:
            raise ConfigError(f"config missing required keys: {sorted(missing)}")
        cfg = cls(**raw)
        # Relative paths resolve against the config file location.
        base = path.parent
        for attr in ("tokenizer", "corpus", "word_list", "script_table", "out_dir"):
            value = getattr(cfg, attr)
            if value is not None and not Path(value).is_absolute():
                setattr(cfg, attr, str(base / value))
        return cfg

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(dataclasses.asdict(self), ensure_ascii=False, indent=1),
            encoding="utf-8",
        )

    def check_paths(self) -> None:
        for attr in ("tokenizer", "corpus", "word_list", "script_table"):
            value = getattr(self, attr)
            if value is not None and not Path(value).exists():
                raise ConfigError(f"{attr} path {value} does not exist")
        if self.target_budget <= 0 or self.allocation_budget < 0:
            raise ConfigError("budget fields must be positive")


def load_word_list(path: str | Path) -> list[str]:
    """Newline-delimited UTF-8 entries; leading spaces are significant."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            words.append(line.rstrip("\n"))
    return words


def allocation_inputs(
    model: TokenizerModel, table: ScriptTable, fires, scripts: list[str]
) -> tuple[dict[str, float], dict[str, float]]:
    """Coverage proxy and corpus-share weight per target script.

    Coverage counts existing vocabulary tokens touching the script (lower
    means worse covered); share sums their fire counts, plus-one smoothed.
    """
    classes = {table.script_class(s): s for s in scripts}
    coverage = {s: 0.0 for s in scripts}
    share = {s: 1.0 for s in scripts}
    for token, tid in model.vocab.items():
        prof = profile_token(model, table, token)
        for cls in prof.scripts & set(classes):
            coverage[classes[cls]] += 1.0
            share[classes[cls]] += float(fires.counts[tid])
    return coverage, share


@dataclass
class PipelineOutcome:
    final_model: TokenizerModel
    verify_passed: bool
    out_dir: Path
    summary: dict


def run_pipeline(config: PipelineConfig, jobs: int | None = None) -> PipelineOutcome:
    config.check_paths()
    jobs = jobs if jobs is not None else config.jobs
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    table = (
        ScriptTable.load(config.script_table)
        if config.script_table
        else default_table()
    )
    base = load_tokenizer(config.tokenizer)
    corpus = read_corpus(config.corpus)

    # Stage 1: crop to the exact budget. Filler, if needed, is ranked by
    # fire rate measured on the base model.
    fires_base = count_fires(base, corpus, jobs=jobs)
    crop_plan = plan_crop(
        base, table, set(config.prune_scripts), config.target_budget, fires_base
    )
    crop_plan.save(out_dir / "crop_plan.json")
    cropped = apply_crop(base, crop_plan)
    save_tokenizer(cropped, out_dir / "cropped.json")

    # Stage 2a: audit the cropped model.
    fires = count_fires(cropped, corpus, jobs=jobs)
    fires.save(out_dir / "fires.json")
    dead = find_dead_slots(
        cropped,
        table,
        fires,
        config.floor_per_billion,
        set(config.policy_scripts) if config.policy_scripts else None,
    )
    dead.save(out_dir / "dead_slots.json")

    # Stage 2b: candidates per target script, cross-script rule enforced,
    # already-present compositions dropped.
    candidates_by_script: dict[str, list] = {}
    rejected_total = 0
    for script in config.target_scripts:
        try:
            raw = train_candidates(
                corpus,
                max_candidates=config.max_candidates,
                table=table,
                target_scripts={script},
                pretokenizer_pattern=cropped.pretokenizer_pattern,
                reference=cropped,
            )
        except Exception as exc:
            raise ConfigError(f"candidate training failed for {script}: {exc}") from exc
        admissible, rejected = filter_cross_script(raw, table, reference=cropped)
        rejected_total += len(rejected)
        fresh = []
        seen: set[str] = set()
        for cand in admissible:
            if cand.composed in cropped.vocab or cand.composed in seen:
                continue
            seen.add(cand.composed)
            fresh.append(cand)
        candidates_by_script[script] = fresh

    # Stage 2c: allocation. Word entries reserve their script's slots first;
    # the solver distributes the remainder over the candidate curves.
    words = load_word_list(config.word_list) if config.word_list else []
    words_by_script: dict[str, int] = {}
    from .surgery import _entry_for_text  # entry validation shared with assembly

    for word in words:
        entry = _entry_for_text(cropped, table, word, "word-level")
        words_by_script[entry.script] = words_by_script.get(entry.script, 0) + 1
    unknown_scripts = set(words_by_script) - set(config.target_scripts)
    if unknown_scripts:
        raise ConfigError(
            f"word list contains scripts outside target_scripts: {sorted(unknown_scripts)}"
        )

    extras = len(config.numerals) + len(config.punctuation) + len(config.artifacts)
    words_total = sum(words_by_script.values())
    curves = {
        s: build_curve(s, [(c, c.fire_count) for c in candidates_by_script[s]])
        for s in config.target_scripts
    }
    ceiling_total = sum(c.ceiling for c in curves.values())
    # Size against the chain-protected dead pool, not the raw rate filter:
    # intermediates feeding surviving tokens are not removable.
    removable = len(removable_dead_tokens(cropped, dead))
    solver_budget = min(
        config.allocation_budget - words_total,
        ceiling_total,
        removable - extras - words_total,
    )
    if solver_budget < 0:
        raise ConfigError(
            f"allocation budget cannot cover {words_total} word entries and "
            f"{extras} fixed insertions with {removable} removable dead slots"
        )
    coverage, share = allocation_inputs(cropped, table, fires, config.target_scripts)

    # Incoming word/numeral rules may pin a few more dead intermediates in
    # place; on a shortage, shrink the solver budget by the deficit and retry.
    while True:
        problem = AllocationProblem(
            curves=curves, budget=solver_budget, coverage=coverage, corpus_share=share
        )
        solved = allocate(problem, config.allocation_policy)
        combined_x = {
            s: solved.x.get(s, 0) + words_by_script.get(s, 0)
            for s in config.target_scripts
        }
        allocation = AllocationResult(
            x=combined_x,
            total_savings=solved.total_savings,
            policy=solved.policy,
            slots_used=sum(combined_x.values()),
        )
        try:
            plan = assemble_plan(
                cropped,
                table,
                dead,
                allocation,
                candidates_by_script,
                word_list=words,
                numerals=config.numerals,
                punctuation=config.punctuation,
                artifacts=config.artifacts,
            )
            break
        except InsufficientDeadSlotsError as exc:
            solver_budget -= exc.needed - exc.available
            if solver_budget < 0:
                raise ConfigError(
                    f"dead-slot supply too small: {exc.available} removable slots "
                    f"cannot host the {extras + words_total} fixed insertions"
                ) from exc

    problem.save(out_dir / "allocation_problem.json")
    allocation.save(out_dir / "allocation.json")
    (out_dir / "policies.csv").write_text(
        policies_csv(compare_policies(problem)), encoding="utf-8"
    )
    plan.save(out_dir / "surgery_plan.json")
    surgered = apply_surgery(cropped, plan)
    fires_final = count_fires(surgered, corpus, jobs=jobs)
    final = permute_ids(surgered, fires_final)
    final = final.replace(name="tokenizer")
    save_tokenizer(final, out_dir / "tokenizer.json")

    # Verification gate.
    merges_report = verify_no_cross_script_merges(final, table)
    bytes_report = verify_max_byte_length(final, config.byte_ceiling)
    validation = validate_model(final)
    unified = verify_unified([final], table, config.byte_ceiling)
    suite = run_audit_suite(final, table)
    suite.save(out_dir / "audit_suite.json")
    verify_text = "\n\n".join(
        [merges_report.render(), bytes_report.render(), render_unified(unified)]
    )
    (out_dir / "verify.txt").write_text(verify_text, encoding="utf-8")
    save_unified(unified, out_dir / "unified.json")

    passed = (
        merges_report.passed
        and bytes_report.passed
        and validation.ok
        and unified[0].both_clean
        and final.size == config.target_budget
    )
    summary = {
        "base_size": base.size,
        "cropped_size": cropped.size,
        "final_size": final.size,
        "dead_slots": len(dead.all_dead),
        "insertions": len(plan.inserted),
        "new_merges": len(plan.new_merges),
        "rejected_cross_script": rejected_total,
        "verify_passed": passed,
    }
    (out_dir / "summary.json").write_text(
        json.dumps(summary, indent=1), encoding="utf-8"
    )
    return PipelineOutcome(
        final_model=final, verify_passed=passed, out_dir=out_dir, summary=summary
    )
