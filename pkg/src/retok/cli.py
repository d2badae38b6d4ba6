"""Command-line entry point: stage subcommands plus the full pipeline.

Exit codes: 0 on success (and all verifications passing), 1 when a
verification check fails, 2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .allocation import AllocationProblem, allocate, compare_policies, policies_csv
from .audit import count_fires, find_dead_slots, read_corpus, run_audit_suite
from .crop import apply_crop, plan_crop
from .model import TokenizerFormatError, load_tokenizer, save_tokenizer
from .pipeline import ConfigError, PipelineConfig, run_pipeline
from .scripts import ScriptTable, default_table
from .verify import (
    render_unified,
    verify_max_byte_length,
    verify_no_cross_script_merges,
    verify_structural_identity,
    verify_unified,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2


def _table(args) -> ScriptTable:
    if getattr(args, "table", None):
        return ScriptTable.load(args.table)
    return default_table()


def _out_dir(args) -> Path:
    out = Path(getattr(args, "out", None) or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_crop(args) -> int:
    model = load_tokenizer(args.tokenizer)
    table = _table(args)
    fires = None
    if args.fires:
        from .audit import FireCounts

        fires = FireCounts.load(args.fires)
    elif args.corpus:
        fires = count_fires(model, read_corpus(args.corpus), jobs=args.jobs)
    plan = plan_crop(model, table, set(args.prune.split(",")), args.budget, fires)
    out = _out_dir(args)
    plan.save(out / "crop_plan.json")
    cropped = apply_crop(model, plan)
    save_tokenizer(cropped, out / "cropped.json")
    print(plan.to_json())
    return EXIT_OK


def cmd_audit(args) -> int:
    model = load_tokenizer(args.tokenizer)
    table = _table(args)
    corpus = read_corpus(args.corpus)
    fires = count_fires(model, corpus, jobs=args.jobs)
    out = _out_dir(args)
    fires.save(out / "fires.json")
    (out / "fires.csv").write_text(fires.to_csv(model), encoding="utf-8")
    dead = find_dead_slots(model, table, fires, args.floor)
    dead.save(out / "dead_slots.json")
    suite = run_audit_suite(model, table)
    suite.save(out / "audit_suite.json")
    print(suite.render())
    print(
        f"dead slots: {len(dead.zero_fire)} zero-fire, {len(dead.marginal)} marginal"
    )
    return EXIT_FAIL if suite.failed else EXIT_OK


def cmd_allocate(args) -> int:
    problem = AllocationProblem.load(args.problem)
    if args.budget is not None:
        problem.budget = args.budget
    result = allocate(problem, args.policy)
    out = _out_dir(args)
    result.save(out / "allocation.json")
    rows = compare_policies(problem)
    (out / "policies.csv").write_text(policies_csv(rows), encoding="utf-8")
    print(json.dumps(result.__dict__, indent=1))
    return EXIT_OK


def cmd_verify(args) -> int:
    table = _table(args)
    if args.check == "identity":
        if not args.other:
            raise ConfigError("verify identity needs --other")
        report = verify_structural_identity(
            load_tokenizer(args.tokenizer), load_tokenizer(args.other)
        )
        print(report.render())
        return EXIT_OK if report.passed else EXIT_FAIL
    if args.check == "unified":
        models = [load_tokenizer(p) for p in [args.tokenizer] + (args.more or [])]
        rows = verify_unified(models, table, args.ceiling)
        print(render_unified(rows, args.ceiling))
        return EXIT_OK if all(r.both_clean for r in rows) else EXIT_FAIL
    model = load_tokenizer(args.tokenizer)
    if args.check == "merges":
        report = verify_no_cross_script_merges(model, table)
    elif args.check == "bytes":
        report = verify_max_byte_length(model, args.ceiling)
    else:  # pragma: no cover - argparse restricts choices
        raise ConfigError(f"unknown check {args.check}")
    print(report.render())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_eval(args) -> int:
    from . import evaluate as ev

    models = {}
    for path in args.tokenizer:
        model = load_tokenizer(path)
        models[model.name] = model
    out = _out_dir(args)
    if args.metric in ("fertility", "bytes", "volume", "regime") and not args.manifest:
        raise ConfigError(f"eval {args.metric} needs --manifest")
    if args.metric == "trace" and not args.text:
        raise ConfigError("eval trace needs --text")
    if args.metric == "fertility":
        corpora = ev.load_manifest(args.manifest)
        rows = ev.fertility(models, corpora)
        (out / "fertility.csv").write_text(ev.fertility_csv(rows), encoding="utf-8")
        for name, mean in ev.mean_fertility(rows).items():
            print(f"{name:<28} mean fertility {mean:.3f}")
    elif args.metric == "bytes":
        corpora = ev.load_manifest(args.manifest)
        rows = ev.bytes_per_token(models, corpora)
        (out / "bytes_per_token.csv").write_text(
            ev.compression_csv(rows), encoding="utf-8"
        )
        for r in rows:
            print(f"{r.tokenizer:<28} {r.corpus_class:<12} {r.bytes_per_token:.3f} B/tok")
    elif args.metric == "volume":
        corpora = ev.load_manifest(args.manifest)
        rows = ev.token_volume(models, corpora)
        baseline = next(iter(models))
        (out / "token_volume.csv").write_text(
            ev.volume_csv(rows, baseline), encoding="utf-8"
        )
        for row in rows:
            print(row.language, row.totals)
    elif args.metric == "trace":
        for trace in ev.merge_trace(models, args.text):
            print(
                f"{trace.tokenizer:<28} tokens={trace.total_tokens} "
                f"broken={trace.broken_characters} ({trace.percent_broken:.1f}%)"
            )
    elif args.metric == "digits":
        for name, model in models.items():
            print(f"{name:<28} {ev.digit_grouping_check(model)}")
    elif args.metric == "regime":
        corpora = ev.load_manifest(args.manifest)
        thresholds = {}
        if getattr(args, "config", None):
            config = PipelineConfig.from_file(args.config)
            thresholds = {
                "byte_fallback_tokens_per_char": config.regime_byte_fallback_tokens_per_char,
                "whole_word_tokens_per_word": config.regime_whole_word_tokens_per_word,
            }
        for name, model in models.items():
            for lang, texts in corpora.items():
                regime = ev.regime_classify(model, texts, **thresholds)
                print(f"{name:<28} {lang:<8} {regime}")
    return EXIT_OK


def _load_config(args) -> PipelineConfig:
    path = getattr(args, "config", None)
    if not path:
        raise ConfigError("a config file is required (--config PATH)")
    config = PipelineConfig.from_file(path)
    config = apply_overrides(config, getattr(args, "overrides", None))
    if args.out:
        config.out_dir = args.out
    return config


def cmd_surgery(args) -> int:
    # The surgery stage needs audit, candidate, and allocation inputs; the
    # config file carries them all, so this runs the pipeline end to end.
    config = _load_config(args)
    outcome = run_pipeline(config, jobs=args.jobs)
    print(json.dumps(outcome.summary, indent=1))
    return EXIT_OK if outcome.verify_passed else EXIT_FAIL


def cmd_pipeline(args) -> int:
    config = _load_config(args)
    outcome = run_pipeline(config, jobs=args.jobs)
    print(json.dumps(outcome.summary, indent=1))
    print(f"artifacts in {outcome.out_dir}")
    return EXIT_OK if outcome.verify_passed else EXIT_FAIL


def cmd_synth(args) -> int:
    """Write the bundled synthetic fixture set for demos and smoke tests."""
    from . import synthetic

    out = _out_dir(args)
    save_tokenizer(synthetic.base_model(), out / "base.json")
    with (out / "corpus.jsonl").open("w", encoding="utf-8") as fh:
        for text, lang in synthetic.audit_corpus():
            fh.write(json.dumps({"text": text, "lang": lang}, ensure_ascii=False) + "\n")
    (out / "words.txt").write_text(
        "\n".join(synthetic.surgery_word_list()) + "\n", encoding="utf-8"
    )
    base = synthetic.base_model()
    table = default_table()
    from .scripts import profile_token

    prune = {"cjk", "hangul"}
    byte_ids = set(base.byte_fallback_ids)
    matches = sum(
        1
        for tok, tid in base.vocab.items()
        if tid not in byte_ids and profile_token(base, table, tok).scripts & prune
    )
    # Paths inside the config are relative to the config file itself, so
    # the fixture directory can be moved or copied wholesale.
    config = PipelineConfig(
        tokenizer="base.json",
        corpus="corpus.jsonl",
        prune_scripts=sorted(prune),
        target_budget=base.size - matches,
        target_scripts=["oriya", "devanagari"],
        allocation_budget=args.allocation_budget,
        word_list="words.txt",
        numerals=synthetic.surgery_numerals(),
        punctuation=synthetic.surgery_punctuation(),
        out_dir="pipeline",
    )
    config.save(out / "config.json")
    print(f"synthetic fixture written to {out}")
    return EXIT_OK


def apply_overrides(config: PipelineConfig, overrides: list[str]) -> PipelineConfig:
    """Apply `--set key=value` pairs; values parse as JSON, else strings."""
    for item in overrides or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        if not hasattr(config, key):
            raise ConfigError(f"unknown config key {key!r}")
        try:
            parsed = json.loads(value)
        except json.JSONDecodeError:
            parsed = value
        setattr(config, key, parsed)
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="retok",
        description="Byte-level BPE vocabulary crop, audit, surgery, and verification.",
    )
    parser.add_argument("--jobs", type=int, default=1, help="corpus worker count")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--table", help="script table JSON file")
    parser.add_argument("--config", help="pipeline config JSON file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crop", help="script-prune crop to an exact budget")
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--prune", required=True, help="comma-separated script names")
    p.add_argument("--fires", help="precomputed fire counts JSON")
    p.add_argument("--corpus", help="corpus for filler ranking")
    p.set_defaults(func=cmd_crop)

    p = sub.add_parser("audit", help="fire counts, dead slots, hygiene suite")
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--floor", type=float, default=1000.0)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("allocate", help="solve a slot-allocation problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--policy", default="greedy")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("surgery", help="run audit + allocation + surgery from config")
    p.add_argument("--config", default=argparse.SUPPRESS)
    p.add_argument("--set", action="append", dest="overrides", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("verify", help="structural verification checks")
    p.add_argument("check", choices=["merges", "bytes", "identity", "unified"])
    p.add_argument("--tokenizer", required=True)
    p.add_argument("--other", help="second tokenizer for identity")
    p.add_argument("--more", nargs="*", help="additional tokenizers for unified")
    p.add_argument("--ceiling", type=int, default=32)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("eval", help="compression evaluation harness")
    p.add_argument(
        "metric",
        choices=["fertility", "bytes", "volume", "trace", "digits", "regime"],
    )
    p.add_argument("--tokenizer", nargs="+", required=True)
    p.add_argument("--manifest", help="corpus manifest JSON")
    p.add_argument("--text", help="input text for trace")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="crop -> audit -> allocate -> surgery -> verify")
    p.add_argument("--config", default=argparse.SUPPRESS)
    p.add_argument("--set", action="append", dest="overrides", metavar="KEY=VALUE")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("synth", help="write the bundled synthetic fixture set")
    p.add_argument("--allocation-budget", type=int, default=24)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TokenizerFormatError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
