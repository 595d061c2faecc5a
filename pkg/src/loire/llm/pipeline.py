"""Primitive rule generation: conclusions, premises, filtering, diversifying."""

from __future__ import annotations

import itertools
import json
import logging
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .. import prompts
from ..chaining import diversify
from ..grammar import parse_fact, parse_rule, rule_id
from ..rules import DOMAINS, Fact, Rule, RuleError, TypedVariable, negate_predicate
from ..validator import run_checks
from ..verbalize import verbalize_fact, verbalize_rule
from ..vocab import ABSTRACT_OBJECTS, DEFAULT_VOCAB, Vocabulary
from .client import ClientError, CompletionRequest, ModelClient, RetryingClient

log = logging.getLogger(__name__)

STAGES = (
    "generated",
    "grammar_rejected",
    "primitive_rejected",
    "trivial_rejected",
    "critic_rejected",
    "dedup_rejected",
    "kept",
)
_CHECK_STAGE = {"grammar": "grammar_rejected", "primitive": "primitive_rejected",
                "trivial": "trivial_rejected"}
_FACT_RE = re.compile(r"[A-Z][A-Za-z0-9]*\s*\([^()]*\)")
_NUMBERED_RE = re.compile(r"^\s*\d+\s*[.)]\s*(.*)$")
_PROLOG_SPLIT_RE = re.compile(r"^(.*\))\s*[;.]?\s*(.*)$")
_VERBAL_SPLIT_RE = re.compile(r",\s*and\s+|\s+and\s+|,\s*|\s+which\s+|\s+who\s+|\s+that\s+")
_VERDICT_RE = re.compile(r"^\s*(?:output\s*:\s*)?(true|false)\b[\s.,:;!-]*(.*)$", re.I | re.S)


def all_object_pairs(objects: Sequence[str] = ABSTRACT_OBJECTS) -> list[tuple[str, str]]:
    """Unordered pairs with repetition: 528 for the 32 default objects."""
    return list(itertools.combinations_with_replacement(objects, 2))


def _request(config_model: str, prompt: str, temperature: float, max_tokens: int,
             logit_bias=None) -> CompletionRequest:
    return CompletionRequest.from_prompt(
        config_model, prompt, temperature=temperature, max_tokens=max_tokens, logit_bias=logit_bias
    )


# ------------------------------------------------------------------ Step 1

def render_conclusion_prompt(pair: tuple[str, str], domain: str) -> str:
    return prompts.CONCLUSION_PREPARATION.format(
        domain_phrase=prompts.DOMAIN_PHRASES[domain], object1=pair[0], object2=pair[1]
    )


def parse_conclusions(text: str) -> list[Fact]:
    facts: list[Fact] = []
    for line in text.splitlines():
        for m in _FACT_RE.finditer(line):
            try:
                fact = parse_fact(m.group(0))
            except RuleError as exc:
                log.debug("unparseable conclusion %r: %s", m.group(0), exc)
                continue
            if fact.var_names == ("X", "Y") and fact not in facts:
                facts.append(fact)
    return facts


def prepare_conclusions(
    pair: tuple[str, str],
    domain: str,
    client: ModelClient,
    vocab: Vocabulary = DEFAULT_VOCAB,
    model_name: str = "gpt-4",
    temperature: float = 0.7,
    max_tokens: int = 512,
) -> list[Fact]:
    """Ask for predicates linking two object types; negate them where the domain calls for it."""
    for obj in pair:
        if obj not in vocab.abstract_objects:
            raise ValueError(f"{obj!r} is not an abstract object")
    reply = client.complete(_request(model_name, render_conclusion_prompt(pair, domain),
                                     temperature, max_tokens))
    facts = parse_conclusions(reply)
    if not facts:
        log.warning("no parseable conclusions for %s/%s in %s", pair[0], pair[1], domain)
        return []
    if domain in prompts.NEGATED_DOMAINS:
        for fact in list(facts):
            neg = Fact(negate_predicate(fact.predicate, vocab), fact.arg1, fact.arg2)
            if neg not in facts:
                facts.append(neg)
    return facts


# ------------------------------------------------------------------ Step 2

def render_premise_prompt(conclusion: Fact, domain: str, kind: str) -> str:
    if kind == "multi":
        line, demos = prompts.MULTI_FACT_LINE, prompts.MULTI_FACT_DEMOS[domain]
    elif kind == "single":
        line, demos = prompts.SINGLE_FACT_LINE, prompts.SINGLE_FACT_DEMOS
    else:
        raise ValueError(f"unknown premise kind {kind!r}")
    return prompts.PREMISE_INSTRUCTION.format(
        fact_count_line=line,
        domain_description=prompts.DOMAIN_DESCRIPTIONS[domain],
        demonstrations=demos,
        conclusion=str(conclusion),
    )


def logit_bias_for(vocab: Vocabulary, bias: float) -> dict[str, float]:
    words = sorted({w for phrase in vocab.primitive_types for w in phrase.split()})
    return {w: bias for w in words}


def estimate_verbal_fact_count(text: str) -> int:
    """Rough clause count of the premise part of an If/then sentence."""
    premise = text.split(", then ")[0].strip().rstrip(".")
    if premise.lower().startswith("if "):
        premise = premise[3:]
    return len([p for p in _VERBAL_SPLIT_RE.split(premise) if p.strip()])


def parse_premise_reply(
    text: str, conclusion: Fact, domain: Optional[str], vocab: Vocabulary = DEFAULT_VOCAB
) -> list[Rule]:
    """Parse numbered ``Prolog;`` / natural-language pairs into rules."""
    items: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        m = _NUMBERED_RE.match(line)
        if m and ":-" in m.group(1):
            prolog_part = _PROLOG_SPLIT_RE.match(m.group(1))
            prolog, rest = (prolog_part.group(1), prolog_part.group(2)) if prolog_part else (m.group(1), "")
            items.append([prolog, rest.strip()])
        elif items and not items[-1][1] and not line.lower().startswith(("conclusion:", "rules:")):
            items[-1][1] = line
    rules = []
    for prolog, verbal in items:
        try:
            rule = parse_rule(prolog, vocab, domain=domain, provenance="generated",
                              verbalization=verbal or None)
        except RuleError as exc:
            log.info("skipping unparseable rule %r: %s", prolog, exc)
            continue
        if rule.conclusion != conclusion:
            log.info("skipping rule for a different conclusion: %s", rule.conclusion)
            continue
        if verbal and estimate_verbal_fact_count(verbal) != rule.length:
            rule = rule.evolve(flags=rule.flags + ("fact_count_mismatch",))
        rules.append(rule)
    return rules


def generate_premises(
    conclusion: Fact,
    domain: str,
    client: ModelClient,
    vocab: Vocabulary = DEFAULT_VOCAB,
    model_name: str = "gpt-4",
    temperature: float = 0.7,
    max_tokens: int = 1024,
    bias: float = 5.0,
    kinds: Sequence[str] = ("single", "multi"),
) -> list[Rule]:
    """Candidate rules for one conclusion: one request per premise kind."""
    if conclusion.var_names != ("X", "Y"):
        raise ValueError("conclusion arguments must be X and Y")
    logit_bias = None
    if client.supports_logit_bias:
        logit_bias = logit_bias_for(vocab, bias)
    else:
        log.info("client lacks logit bias support; generating without it")
    rules = []
    for kind in kinds:
        prompt = render_premise_prompt(conclusion, domain, kind)
        reply = client.complete(_request(model_name, prompt, temperature, max_tokens, logit_bias))
        rules.extend(parse_premise_reply(reply, conclusion, domain, vocab))
    return rules


# ------------------------------------------------------------------ Step 3

def render_critic_prompt(rule: Rule, domain: str, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    true_in, true_expl, false_in, false_expl = prompts.CRITIC_DEMOS[domain]
    return prompts.SELF_CRITIC.format(
        true_input=true_in, true_explanation=true_expl,
        false_input=false_in, false_explanation=false_expl,
        candidate=rule.verbalization or verbalize_rule(rule, vocab),
    )


def parse_verdict(text: str) -> tuple[Optional[bool], str]:
    m = _VERDICT_RE.match(text)
    if m is None:
        return None, ""
    explanation = re.sub(r"^because\s+", "", m.group(2).strip(), flags=re.I)
    return m.group(1).lower() == "true", explanation


def self_critic_filter(
    rule: Rule,
    domain: str,
    client: ModelClient,
    vocab: Vocabulary = DEFAULT_VOCAB,
    model_name: str = "gpt-4",
    temperature: float = 0.0,
    max_tokens: int = 256,
) -> tuple[bool, str]:
    """Ask the model to judge its own rule; unparseable verdicts count as False."""
    reply = client.complete(_request(model_name, render_critic_prompt(rule, domain, vocab),
                                     temperature, max_tokens))
    verdict, explanation = parse_verdict(reply)
    if verdict is None:
        return False, "critic_unparseable"
    return verdict, explanation


# ---------------------------------------------------------------- pipeline

@dataclass
class PipelineConfig:
    domains: list[str] = field(default_factory=lambda: list(DOMAINS))
    pairs: Optional[list[tuple[str, str]]] = None
    model_name: str = "gpt-4"
    seed: int = 0
    generation_temperature: float = 0.7
    critic_temperature: float = 0.0
    max_tokens: int = 1024
    logit_bias: float = 5.0
    max_conclusions_per_cell: Optional[int] = None
    diversify: bool = True
    concurrency: int = 1
    checkpoint: Optional[str] = None
    retry_attempts: int = 5
    retry_base_delay: float = 1.0
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    fixtures: Optional[str] = None

    def __post_init__(self) -> None:
        for d in self.domains:
            if d not in DOMAINS:
                raise ValueError(f"unknown domain {d!r}")
        if self.pairs is not None:
            self.pairs = [tuple(p) for p in self.pairs]

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def cells(self) -> list[tuple[tuple[str, str], str]]:
        pairs = self.pairs if self.pairs is not None else all_object_pairs()
        return [(tuple(p), d) for p in pairs for d in self.domains]


def _zero_counts() -> dict[str, int]:
    return {s: 0 for s in STAGES}


@dataclass
class PipelineReport:
    counts: dict[str, int] = field(default_factory=_zero_counts)
    per_domain: dict[str, dict[str, int]] = field(default_factory=dict)
    pool: dict[str, int] = field(default_factory=lambda: {"requested": 0, "accepted": 0})
    completed_cells: int = 0
    incomplete_cells: list[str] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    def add(self, domain: str, stage: str, n: int = 1) -> None:
        dom = self.per_domain.setdefault(domain, _zero_counts())
        for bucket in (self.counts, dom):
            bucket[stage] += n

    def balanced(self) -> bool:
        buckets = [self.counts, *self.per_domain.values()]
        return all(b["generated"] == sum(b[s] for s in STAGES if s != "generated") for b in buckets)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class _Outcome:
    rule: Rule
    stage: str  # a *_rejected stage, or "passed" before dedup


@dataclass
class _CellResult:
    key: str
    domain: str
    outcomes: list[_Outcome] = field(default_factory=list)
    pool_requested: int = 0
    pool_accepted: int = 0
    error: Optional[str] = None


def cell_key(pair: tuple[str, str], domain: str) -> str:
    return f"{pair[0]}|{pair[1]}|{domain}"


def repetition_signature(rule: Rule) -> tuple:
    return (rule.conclusion.predicate, tuple(sorted(f.predicate for f in rule.premise)))


class _CellRunner:
    def __init__(self, config: PipelineConfig, client: ModelClient, vocab: Vocabulary):
        self.config = config
        self.client = client
        self.vocab = vocab

    def screen(self, rule: Rule, domain: str) -> str:
        for report in run_checks(rule, self.vocab):
            if not report.passed:
                return _CHECK_STAGE[report.check]
        ok, _ = self_critic_filter(
            rule, domain, self.client, self.vocab, self.config.model_name,
            self.config.critic_temperature,
        )
        return "passed" if ok else "critic_rejected"

    def forward_pool(self, rule: Rule, domain: str, result: _CellResult) -> list[Rule]:
        premise = f"If {verbalize_fact(rule.conclusion, self.vocab)}."
        prompt = prompts.CONCLUSION_GENERATION_PROMPT.format(premise=premise)
        result.pool_requested += 1
        reply = self.client.complete(_request(self.config.model_name, prompt,
                                              self.config.generation_temperature,
                                              self.config.max_tokens))
        for fact in parse_conclusions(reply):
            try:
                sub = Rule(fact, (rule.conclusion,), domain=domain, provenance="intermediate")
            except RuleError:
                continue
            if self.screen(sub, domain) == "passed":
                result.pool_accepted += 1
                return [sub]
        return []

    def backward_pool(self, rule: Rule, domain: str, result: _CellResult) -> list[Rule]:
        target = rule.premise[0]
        if target.arg1.var_name == target.arg2.var_name:
            return []
        conclusion = Fact(target.predicate, TypedVariable("X", target.arg1.var_type),
                          TypedVariable("Y", target.arg2.var_type))
        result.pool_requested += 1
        candidates = generate_premises(
            conclusion, domain, self.client, self.vocab, self.config.model_name,
            self.config.generation_temperature, self.config.max_tokens,
            self.config.logit_bias, kinds=("single",),
        )
        for sub in candidates:
            if sub.length == 1 and self.screen(sub, domain) == "passed":
                result.pool_accepted += 1
                return [sub.evolve(provenance="intermediate")]
        return []

    def __call__(self, cell: tuple[tuple[str, str], str]) -> _CellResult:
        pair, domain = cell
        cfg = self.config
        result = _CellResult(cell_key(pair, domain), domain)
        try:
            conclusions = prepare_conclusions(
                pair, domain, self.client, self.vocab, cfg.model_name,
                cfg.generation_temperature, cfg.max_tokens,
            )
            if cfg.max_conclusions_per_cell is not None:
                conclusions = conclusions[: cfg.max_conclusions_per_cell]
            for conclusion in conclusions:
                candidates = generate_premises(
                    conclusion, domain, self.client, self.vocab, cfg.model_name,
                    cfg.generation_temperature, cfg.max_tokens, cfg.logit_bias,
                )
                kept = []
                for rule in candidates:
                    stage = self.screen(rule, domain)
                    result.outcomes.append(_Outcome(rule, stage))
                    if stage == "passed":
                        kept.append(rule)
                if not cfg.diversify:
                    continue
                for rule in kept:
                    pool = self.forward_pool(rule, domain, result)
                    pool += self.backward_pool(rule, domain, result)
                    parent = rule_id(rule)
                    for div in diversify(rule, pool, self.vocab):
                        div = div.evolve(parent_ids=(parent,) + div.parent_ids[1:])
                        result.outcomes.append(_Outcome(div, self.screen(div, domain)))
        except ClientError as exc:
            log.error("cell %s aborted: %s", result.key, exc)
            result.error = str(exc)
        return result


def _load_checkpoint(path: Optional[str]) -> dict:
    if path and os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return {"completed": {}}


def _write_checkpoint(path: str, data: dict) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=1, sort_keys=True)
    os.replace(tmp, path)


def run_pipeline(config: PipelineConfig, client: ModelClient, store,
                 vocab: Vocabulary = DEFAULT_VOCAB) -> PipelineReport:
    """Run every (pair, domain) cell and append kept rules to ``store``.

    Cells may run concurrently but are committed in config order, so the
    repetition filter and the store contents do not depend on scheduling.
    Cells recorded in the checkpoint are skipped and their counts reused.
    """
    from ..store import record_from_rule

    start = time.perf_counter()
    if not isinstance(client, RetryingClient):
        client = RetryingClient(client, config.retry_attempts, config.retry_base_delay,
                                seed=config.seed)
    report = PipelineReport()
    checkpoint = _load_checkpoint(config.checkpoint)
    signatures = {repetition_signature(r.to_rule(vocab)) for r in store.records()}

    todo = []
    for cell in config.cells():
        key = cell_key(*cell)
        done = checkpoint["completed"].get(key)
        if done is None:
            todo.append(cell)
            continue
        for stage, n in done["counts"].items():
            report.add(cell[1], stage, n)
        report.completed_cells += 1

    runner = _CellRunner(config, client, vocab)
    if config.concurrency > 1:
        pool = ThreadPoolExecutor(max_workers=config.concurrency)
        results = pool.map(runner, todo)
    else:
        pool = None
        results = map(runner, todo)
    try:
        for result in results:
            report.pool["requested"] += result.pool_requested
            report.pool["accepted"] += result.pool_accepted
            if result.error is not None:
                report.incomplete_cells.append(result.key)
                continue
            counts = _zero_counts()
            records = []
            for outcome in result.outcomes:
                counts["generated"] += 1
                stage = outcome.stage
                if stage == "passed":
                    sig = repetition_signature(outcome.rule)
                    if sig in signatures:
                        stage = "dedup_rejected"
                    else:
                        signatures.add(sig)
                        stage = "kept"
                        records.append(record_from_rule(outcome.rule, vocab))
                counts[stage] += 1
            store.append(records)
            for stage, n in counts.items():
                report.add(result.domain, stage, n)
            report.completed_cells += 1
            if config.checkpoint:
                checkpoint["completed"][result.key] = {"counts": counts}
                _write_checkpoint(config.checkpoint, checkpoint)
    finally:
        if pool is not None:
            pool.shutdown(wait=True, cancel_futures=True)
    report.elapsed_seconds = time.perf_counter() - start
    return report
