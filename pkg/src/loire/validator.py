"""Heuristic rule filters: grammatical validity, primitiveness, triviality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .rules import Rule, is_negated
from .vocab import DEFAULT_VOCAB, Vocabulary

MAX_PRIMITIVE_LENGTH = 3


@dataclass(frozen=True)
class Reason:
    code: str
    message: str
    arg: Optional[object] = None

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": self.message}
        if self.arg is not None:
            d["arg"] = self.arg
        return d


@dataclass(frozen=True)
class ValidityReport:
    check: str  # "grammar", "primitive" or "trivial"
    reasons: tuple[Reason, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.reasons

    @property
    def codes(self) -> list[str]:
        return [r.code for r in self.reasons]

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "passed": self.passed,
            "reasons": [r.to_dict() for r in self.reasons],
        }


def check_grammatical_validity(rule: Rule) -> ValidityReport:
    """Premise variables must form one connected graph containing X and Y.

    Nodes are premise variable names, edges are premise facts. Conclusion
    variables contribute no nodes.
    """
    adjacency: dict[str, set[str]] = {}
    for fact in rule.premise:
        a, b = fact.var_names
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)

    reasons = []
    if "X" not in adjacency:
        reasons.append(Reason("missing_X", "variable X does not occur in the premise"))
    if "Y" not in adjacency:
        reasons.append(Reason("missing_Y", "variable Y does not occur in the premise"))

    start = next(iter(adjacency))
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adjacency[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(adjacency):
        reasons.append(
            Reason("disconnected_component", "premise variables form more than one component")
        )
    return ValidityReport("grammar", tuple(reasons))


def check_primitiveness(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> ValidityReport:
    reasons = []
    seen = set()
    for fact in rule.facts:
        for t in fact.var_types:
            if t not in vocab.primitive_types and t not in seen:
                seen.add(t)
                reasons.append(Reason("nonprimitive_type", f"type {t!r} is not a primitive type", t))
    if rule.length > MAX_PRIMITIVE_LENGTH:
        reasons.append(
            Reason("too_many_facts", f"{rule.length} premise facts (at most {MAX_PRIMITIVE_LENGTH})",
                   rule.length)
        )
    return ValidityReport("primitive", tuple(reasons))


def check_triviality(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> ValidityReport:
    if is_negated(rule.conclusion.predicate, vocab) and any(
        is_negated(f.predicate, vocab) for f in rule.premise
    ):
        return ValidityReport(
            "trivial",
            (Reason("negation_both_sides", "negation in both conclusion and premise"),),
        )
    return ValidityReport("trivial")


def run_checks(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> list[ValidityReport]:
    return [
        check_grammatical_validity(rule),
        check_primitiveness(rule, vocab),
        check_triviality(rule, vocab),
    ]


def filter_rules(
    rules: list[Rule], vocab: Vocabulary = DEFAULT_VOCAB
) -> tuple[list[Rule], list[tuple[Rule, list[ValidityReport]]]]:
    kept = []
    rejected = []
    for rule in rules:
        reports = run_checks(rule, vocab)
        if all(r.passed for r in reports):
            kept.append(rule)
        else:
            rejected.append((rule, reports))
    return kept, rejected
