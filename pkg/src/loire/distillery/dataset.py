"""Three-task instruction dataset built from a rule base."""

from __future__ import annotations

import json
import random
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .. import prompts
from ..grammar import rule_id, serialize_fact, serialize_premise
from ..rules import Rule
from ..verbalize import split_verbalization, verbalize_fact
from ..vocab import DEFAULT_VOCAB, Vocabulary

TASKS = ("conclusion_generation", "premise_completion", "premise_generation")
SPLIT_POLICIES = ("all_prefix_splits", "one_random_split")
FACT_BUCKETS = ("1 fact", "2 facts", "more than 2 facts")
PREMISES_PER_CONCLUSION = 3


@dataclass
class InstructionInstance:
    task: str
    instruction: str
    input: str
    output_symbolic: str
    output_verbalized: str
    source_rule_ids: list[str]
    fact_count_spec: Optional[str] = None
    id: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.fact_count_spec is not None and self.fact_count_spec not in FACT_BUCKETS:
            raise ValueError(f"unknown fact-count bucket {self.fact_count_spec!r}")

    def to_dict(self) -> dict:
        meta = {"id": self.id, "source_rule_ids": list(self.source_rule_ids)}
        if self.fact_count_spec is not None:
            meta["fact_count_spec"] = self.fact_count_spec
        meta.update(self.meta)
        return {
            "task": self.task,
            "instruction": self.instruction,
            "input": self.input,
            "output": {"prolog": self.output_symbolic, "natural_language": self.output_verbalized},
            "meta": meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InstructionInstance":
        meta = dict(data.get("meta", {}))
        return cls(
            task=data["task"],
            instruction=data["instruction"],
            input=data["input"],
            output_symbolic=data["output"]["prolog"],
            output_verbalized=data["output"]["natural_language"],
            source_rule_ids=list(meta.pop("source_rule_ids", [])),
            fact_count_spec=meta.pop("fact_count_spec", None),
            id=meta.pop("id", ""),
            meta=meta,
        )


def fact_bucket(n_facts: int) -> str:
    if n_facts < 1:
        raise ValueError("a premise has at least one fact")
    return FACT_BUCKETS[min(n_facts, 3) - 1]


def _sentence(text: str) -> str:
    text = text.strip()
    return text[:1].upper() + text[1:] + ("" if text.endswith(".") else ".")


def _conclusion_instance(rule: Rule, vocab: Vocabulary) -> InstructionInstance:
    premise, conclusion = split_verbalization(rule, vocab)
    return InstructionInstance(
        task="conclusion_generation",
        instruction=prompts.CONCLUSION_GENERATION_INSTRUCTION,
        input=f"Premise: {premise}.",
        output_symbolic=serialize_fact(rule.conclusion),
        output_verbalized=_sentence(conclusion),
        source_rule_ids=[rule_id(rule)],
    )


def _completion_instance(rule: Rule, cut: int, vocab: Vocabulary) -> InstructionInstance:
    _, conclusion = split_verbalization(rule, vocab)
    shown = ", ".join(verbalize_fact(f, vocab) for f in rule.premise[:cut])
    hidden = rule.premise[cut:]
    return InstructionInstance(
        task="premise_completion",
        instruction=prompts.PREMISE_COMPLETION_INSTRUCTION,
        input=f"Conclusion: {_sentence(conclusion)}\nPartial Premise: If {shown},",
        output_symbolic=serialize_premise(hidden),
        output_verbalized=_sentence(" and ".join(verbalize_fact(f, vocab) for f in hidden)),
        source_rule_ids=[rule_id(rule)],
        meta={"cut": cut},
    )


def _generation_instance(group: Sequence[Rule], vocab: Vocabulary) -> InstructionInstance:
    by_bucket: dict[str, list[Rule]] = {b: [] for b in FACT_BUCKETS}
    for rule in group:
        by_bucket[fact_bucket(rule.length)].append(rule)
    # The fullest bucket wins; ties go to the smaller fact count.
    bucket = max(FACT_BUCKETS, key=lambda b: (len(by_bucket[b]), -FACT_BUCKETS.index(b)))
    chosen = by_bucket[bucket][:PREMISES_PER_CONCLUSION]
    conclusion = _sentence(verbalize_fact(chosen[0].conclusion, vocab))
    return InstructionInstance(
        task="premise_generation",
        instruction=prompts.PREMISE_GENERATION_INSTRUCTION,
        input=f"Fact number: {bucket}\nConclusion: {conclusion}",
        output_symbolic="\n".join(serialize_premise(r.premise) for r in chosen),
        output_verbalized="\n".join(split_verbalization(r, vocab)[0] + "." for r in chosen),
        source_rule_ids=[rule_id(r) for r in chosen],
        fact_count_spec=bucket,
    )


def build_instruction_dataset(
    rules: Iterable[Rule],
    split_policy: str = "all_prefix_splits",
    seed: int = 0,
    vocab: Vocabulary = DEFAULT_VOCAB,
) -> list[InstructionInstance]:
    """Instances grouped by task: conclusion generation, premise completion, premise generation.

    Premise generation emits one instance per distinct conclusion fact, using
    up to three premises from the fact-count bucket holding the most rules.
    """
    if split_policy not in SPLIT_POLICIES:
        raise ValueError(f"split_policy must be one of {SPLIT_POLICIES}")
    rules = list(rules)
    rng = random.Random(seed)

    conclusion_gen = [_conclusion_instance(r, vocab) for r in rules]

    completion = []
    for rule in rules:
        if rule.length < 2:
            continue
        if split_policy == "all_prefix_splits":
            cuts = range(1, rule.length)
        else:
            cuts = [rng.randint(1, rule.length - 1)]
        completion.extend(_completion_instance(rule, c, vocab) for c in cuts)

    groups: "OrderedDict[str, list[Rule]]" = OrderedDict()
    for rule in rules:
        groups.setdefault(serialize_fact(rule.conclusion), []).append(rule)
    generation = [_generation_instance(g, vocab) for g in groups.values()]

    out = conclusion_gen + completion + generation
    counters = {t: 0 for t in TASKS}
    for inst in out:
        inst.id = f"{inst.task}-{counters[inst.task]:06d}"
        counters[inst.task] += 1
    return out


def write_instances(instances: Iterable[InstructionInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_dict(), ensure_ascii=False) + "\n")


def read_instances(path) -> list[InstructionInstance]:
    with open(path, encoding="utf-8") as fh:
        return [InstructionInstance.from_dict(json.loads(line)) for line in fh if line.strip()]
