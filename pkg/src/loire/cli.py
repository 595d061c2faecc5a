"""Command-line tools for inferential rule bases.

Exit codes: 0 on success, 1 on validation failures, 2 on I/O or client errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .chaining import compose_rulebase, diversify
from .distillery import (
    build_instruction_dataset,
    evaluate_generation,
    read_instances,
    write_instances,
)
from .grammar import rule_id
from .llm.client import ClientError, HttpChatClient, ReplayClient, RetryingClient
from .llm.pipeline import PipelineConfig, run_pipeline
from .probing import TEMPLATE_IDS, aggregate, breakdown, run_probes
from .prompts import COT_STRATEGIES
from .rules import RuleError
from .store import (
    RECORD_FIELDS,
    RuleStore,
    import_rulebase,
    record_from_rule,
    save_rulebase,
    stats,
    validate_rulebase,
)
from .validator import run_checks

log = logging.getLogger("loire")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class CliError(Exception):
    """I/O or client problem reported with exit code 2."""


def _write_json(path, data) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_rules(path):
    records, errors = validate_rulebase(path)
    for err in errors:
        print(f"{path}: {err}", file=sys.stderr)
    return [r.to_rule() for r in records], errors


def parse_templates(text: str) -> list[int]:
    """Accept "1..5", "2-4", "1,3,5" or a single id."""
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text:
            lo, hi = (int(x) for x in text.split(sep, 1))
            ids = list(range(lo, hi + 1))
            break
    else:
        ids = [int(x) for x in text.split(",") if x.strip()]
    bad = [i for i in ids if i not in TEMPLATE_IDS]
    if not ids or bad:
        raise argparse.ArgumentTypeError(f"templates must be within {TEMPLATE_IDS[0]}..{TEMPLATE_IDS[-1]}")
    return ids


def _make_client(kind: str, fixtures: Optional[str], base_url: str, api_key_env: str, seed: int):
    if kind == "mock":
        if fixtures is None:
            raise CliError("--client mock needs a fixtures directory")
        if not Path(fixtures).is_dir():
            raise CliError(f"fixtures directory not found: {fixtures}")
        return ReplayClient(fixtures)
    return RetryingClient(HttpChatClient(base_url, api_key_env), seed=seed)


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    records, errors = validate_rulebase(args.inp)
    failures = [{"line": e.line, "error": e.message} for e in errors]
    if args.strict and failures:
        print(json.dumps(failures[0]))
        return EXIT_INVALID
    for rec in records:
        reports = run_checks(rec.to_rule())
        codes = [c for rep in reports for c in rep.codes]
        if codes:
            failures.append({"id": rec.id, "symbolic": rec.symbolic, "reasons": codes})
            if args.strict:
                break
    for f in failures:
        print(json.dumps(f))
    print(f"{len(records) + len(errors)} records, {len(failures)} failing", file=sys.stderr)
    return EXIT_INVALID if failures else EXIT_OK


def cmd_compose(args) -> int:
    rules, errors = _load_rules(args.inp)
    if errors:
        return EXIT_INVALID
    primitives = [r for r in rules if r.depth == 0]
    composed = compose_rulebase(primitives, args.max_depth, args.max_length, args.seed)
    save_rulebase((record_from_rule(r) for r in composed), args.out)
    print(f"composed {len(composed)} rules from {len(primitives)} primitives", file=sys.stderr)
    return EXIT_OK


def cmd_diversify(args) -> int:
    rules, errors = _load_rules(args.inp)
    pool, pool_errors = _load_rules(args.pool)
    if errors or pool_errors:
        return EXIT_INVALID
    out = [d for rule in rules for d in diversify(rule, pool)]
    save_rulebase((record_from_rule(r) for r in out), args.out)
    print(f"diversified {len(rules)} rules into {len(out)}", file=sys.stderr)
    return EXIT_OK


def cmd_probe(args) -> int:
    rules, errors = _load_rules(args.inp)
    if errors:
        return EXIT_INVALID
    client = _make_client(args.client, args.fixtures, args.base_url, args.api_key_env, 0)
    results = run_probes(rules, client, args.templates, args.form, args.cot, model_name=args.model)
    with open(args.out, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(r.to_dict()) + "\n")
    if args.report:
        by_id = {rule_id(rule): rule for rule in rules}
        report = {
            "templates": args.templates,
            "form": args.form,
            "cot": args.cot,
            "n_rules": len(rules),
            "breakdown": {
                key: {str(k): v for k, v in breakdown(results, by_id, key).items()}
                for key in ("length", "depth", "structure", "polarity")
            },
        }
        if sorted(args.templates) == list(TEMPLATE_IDS) and rules:
            report.update(aggregate(results).to_dict())
        _write_json(args.report, report)
    return EXIT_OK


def cmd_generate(args) -> int:
    config_path = Path(args.config)
    try:
        config = PipelineConfig.load(config_path)
    except (ValueError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    fixtures = config.fixtures
    if fixtures is not None and not Path(fixtures).is_absolute():
        fixtures = str(config_path.parent / fixtures)
    if config.checkpoint is not None and not Path(config.checkpoint).is_absolute():
        config.checkpoint = str(config_path.parent / config.checkpoint)
    client = _make_client(args.client, fixtures, config.base_url, config.api_key_env, config.seed)
    out = Path(args.out)
    resuming = config.checkpoint is not None and Path(config.checkpoint).exists()
    if not resuming:
        out.write_text("", encoding="utf-8")
    report = run_pipeline(config, client, RuleStore(out))
    data = report.to_dict()
    if args.report:
        _write_json(args.report, data)
    print(json.dumps(data["counts"]), file=sys.stderr)
    return EXIT_OK


def cmd_build_instructions(args) -> int:
    rules, errors = _load_rules(args.inp)
    if errors:
        return EXIT_INVALID
    policy = {"all": "all_prefix_splits", "random": "one_random_split"}[args.policy]
    instances = build_instruction_dataset(rules, policy, args.seed)
    write_instances(instances, args.out)
    print(f"wrote {len(instances)} instances", file=sys.stderr)
    return EXIT_OK


def cmd_eval_gen(args) -> int:
    refs = read_instances(args.refs)
    outputs = {}
    with open(args.outputs, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                row = json.loads(line)
                outputs[row["id"]] = row.get("output")
    report = evaluate_generation(outputs, refs, args.task, args.field)
    data = report.to_dict()
    if args.report:
        _write_json(args.report, data)
    print(json.dumps(data))
    return EXIT_OK


def _looks_like_store(path) -> bool:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                try:
                    data = json.loads(line)
                except ValueError:
                    return True
                return isinstance(data, dict) and set(RECORD_FIELDS) <= set(data)
    return True


def cmd_stats(args) -> int:
    if _looks_like_store(args.inp):
        records, errors = validate_rulebase(args.inp)
    else:
        records, errors = import_rulebase(args.inp)
    for err in errors:
        print(f"{args.inp}: {err}", file=sys.stderr)
    table = stats(records)
    print(json.dumps(table.to_dict(), indent=2) if args.json else table.render())
    return EXIT_INVALID if errors else EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loire", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check stored records and run the rule validators")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--strict", action="store_true", help="stop at the first failure")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compose", help="build compositional rules by backward chaining")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--max-depth", type=int, default=3)
    p.add_argument("--max-length", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("diversify", help="forward/backward chain rules against a pool")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--pool", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diversify)

    p = sub.add_parser("probe", help="dual-sided probing of a rule base")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--templates", type=parse_templates, default=list(TEMPLATE_IDS))
    p.add_argument("--form", choices=("verbalized", "symbolic"), default="verbalized")
    p.add_argument("--cot", choices=COT_STRATEGIES, default="answer_explain")
    p.add_argument("--client", choices=("live", "mock"), default="mock")
    p.add_argument("--fixtures")
    p.add_argument("--model", default="gpt-4")
    p.add_argument("--base-url", default="https://api.openai.com/v1")
    p.add_argument("--api-key-env", default="OPENAI_API_KEY")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("generate", help="run the primitive rule generation pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--client", choices=("live", "mock"), default="mock")
    p.add_argument("--out", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build-instructions", help="emit the instruction-tuning dataset")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--policy", choices=("all", "random"), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_instructions)

    p = sub.add_parser("eval-gen", help="BLEU / self-BLEU / fact-count evaluation")
    p.add_argument("--task", required=True,
                   choices=("conclusion_generation", "premise_completion", "premise_generation"))
    p.add_argument("--outputs", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--field", choices=("prolog", "natural_language"), default="prolog")
    p.add_argument("--report")
    p.set_defaults(func=cmd_eval_gen)

    p = sub.add_parser("stats", help="rule counts by domain and category")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ClientError, CliError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RuleError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
