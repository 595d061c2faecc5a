"""Rule AST: typed variables, binary facts and Conclusion:-Premise rules."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from .vocab import DEFAULT_VOCAB, Vocabulary

DOMAINS = ("affordance", "accessibility", "interaction", "location", "need")
STRUCTURES = ("single", "transitive", "disjunctive", "disjunctive_transitive")
PROVENANCES = (
    "generated",
    "intermediate",
    "diversified_forward",
    "diversified_backward",
    "composed",
    "imported",
)
MAX_LENGTH = 6
MAX_DEPTH = 3

VAR_NAME_RE = re.compile(r"[A-Z][0-9]?")
TYPE_WORD_RE = re.compile(r"[A-Z][A-Za-z0-9]*")
PREDICATE_RE = re.compile(r"[A-Z][A-Za-z0-9]*")
_CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


class RuleError(ValueError):
    """Base class for malformed rules."""


class ConclusionVariableError(RuleError):
    pass


class InconsistentTypeError(RuleError):
    pass


def camel_segments(name: str) -> list[str]:
    """Split ``CanNotEat`` into ``["Can", "Not", "Eat"]``."""
    return [s for s in _CAMEL_SPLIT_RE.split(name) if s]


def negation_index(predicate: str, vocab: Vocabulary = DEFAULT_VOCAB) -> Optional[int]:
    """Index of the first negation segment of ``predicate``, or None.

    Matching is segment-exact. "Un" only counts as the leading segment.
    """
    for i, seg in enumerate(camel_segments(predicate)):
        if seg == "Un":
            if i == 0 and "Un" in vocab.negation_segments:
                return i
        elif seg in vocab.negation_segments:
            return i
    return None


def is_negated(predicate: str, vocab: Vocabulary = DEFAULT_VOCAB) -> bool:
    return negation_index(predicate, vocab) is not None


def negate_predicate(predicate: str, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    """Toggle negation on a predicate name; applying it twice is the identity."""
    segments = camel_segments(predicate)
    idx = negation_index(predicate, vocab)
    if idx is not None:
        del segments[idx]
    elif segments[0] in vocab.modal_prefixes:
        segments.insert(1, "Not")
    else:
        segments.insert(0, "Not")
    return "".join(segments)


@dataclass(frozen=True)
class TypedVariable:
    var_name: str
    var_type: str

    def __post_init__(self) -> None:
        if not VAR_NAME_RE.fullmatch(self.var_name):
            raise RuleError(f"bad variable name {self.var_name!r}")
        words = self.var_type.split(" ")
        if not (1 <= len(words) <= 2) or not all(TYPE_WORD_RE.fullmatch(w) for w in words):
            raise RuleError(f"bad variable type {self.var_type!r}")

    def __str__(self) -> str:
        return f"{self.var_type} {self.var_name}"


@dataclass(frozen=True)
class Fact:
    predicate: str
    arg1: TypedVariable
    arg2: TypedVariable

    def __post_init__(self) -> None:
        if not PREDICATE_RE.fullmatch(self.predicate):
            raise RuleError(f"bad predicate {self.predicate!r}")

    @property
    def args(self) -> tuple[TypedVariable, TypedVariable]:
        return (self.arg1, self.arg2)

    @property
    def var_names(self) -> tuple[str, str]:
        return (self.arg1.var_name, self.arg2.var_name)

    @property
    def var_types(self) -> tuple[str, str]:
        return (self.arg1.var_type, self.arg2.var_type)

    def rename(self, mapping: dict[str, str]) -> "Fact":
        return Fact(
            self.predicate,
            TypedVariable(mapping.get(self.arg1.var_name, self.arg1.var_name), self.arg1.var_type),
            TypedVariable(mapping.get(self.arg2.var_name, self.arg2.var_name), self.arg2.var_type),
        )

    def __str__(self) -> str:
        return f"{self.predicate}({self.arg1}, {self.arg2})"


def variable_types(facts: Iterable[Fact]) -> dict[str, str]:
    """Map var_name to var_type, raising on conflicting types."""
    seen: dict[str, str] = {}
    for fact in facts:
        for arg in fact.args:
            prev = seen.setdefault(arg.var_name, arg.var_type)
            if prev != arg.var_type:
                raise InconsistentTypeError(
                    f"variable {arg.var_name} has types {prev!r} and {arg.var_type!r}"
                )
    return seen


@dataclass(frozen=True)
class Rule:
    conclusion: Fact
    premise: tuple[Fact, ...]
    domain: Optional[str] = None
    depth: int = 0
    structure: Optional[str] = None
    provenance: str = "imported"
    verified: Optional[bool] = None
    verbalization: Optional[str] = None
    parent_ids: tuple[str, ...] = ()
    flags: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "premise", tuple(self.premise))
        object.__setattr__(self, "parent_ids", tuple(self.parent_ids))
        object.__setattr__(self, "flags", tuple(self.flags))
        if self.conclusion.var_names != ("X", "Y"):
            raise ConclusionVariableError(
                f"conclusion variables must be X, Y; got {', '.join(self.conclusion.var_names)}"
            )
        if not 1 <= len(self.premise) <= MAX_LENGTH:
            raise RuleError(f"premise length {len(self.premise)} outside 1..{MAX_LENGTH}")
        if not 0 <= self.depth <= MAX_DEPTH:
            raise RuleError(f"depth {self.depth} outside 0..{MAX_DEPTH}")
        if self.domain is not None and self.domain not in DOMAINS:
            raise RuleError(f"unknown domain {self.domain!r}")
        if self.structure is not None and self.structure not in STRUCTURES:
            raise RuleError(f"unknown structure {self.structure!r}")
        if self.provenance not in PROVENANCES:
            raise RuleError(f"unknown provenance {self.provenance!r}")
        variable_types((self.conclusion, *self.premise))

    @property
    def length(self) -> int:
        return len(self.premise)

    @property
    def polarity(self) -> str:
        return "negative" if is_negated(self.conclusion.predicate) else "positive"

    @property
    def facts(self) -> tuple[Fact, ...]:
        return (self.conclusion, *self.premise)

    def key(self) -> tuple[Fact, tuple[Fact, ...]]:
        """The logical content, ignoring metadata."""
        return (self.conclusion, self.premise)

    def var_names(self) -> set[str]:
        return {name for fact in self.facts for name in fact.var_names}

    def evolve(self, **changes) -> "Rule":
        return replace(self, **changes)


def polarity_of(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    return "negative" if is_negated(rule.conclusion.predicate, vocab) else "positive"


def negate_conclusion(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> Rule:
    """Copy of ``rule`` with the conclusion predicate's negation toggled."""
    c = rule.conclusion
    flipped = Fact(negate_predicate(c.predicate, vocab), c.arg1, c.arg2)
    return replace(rule, conclusion=flipped, verbalization=None)
