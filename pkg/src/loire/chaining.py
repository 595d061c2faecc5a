"""Forward/backward chaining, rule diversification and rule-base composition."""

from __future__ import annotations

import logging
import random
import string
from typing import Iterator

from .grammar import rule_id, serialize_rule
from .rules import MAX_DEPTH, MAX_LENGTH, Fact, Rule, RuleError
from .structure import classify_structure
from .validator import check_grammatical_validity
from .vocab import DEFAULT_VOCAB, Vocabulary

__all__ = [
    "ChainingError",
    "PredicateMismatch",
    "TypeMismatch",
    "LengthOverflow",
    "DepthOverflow",
    "backward_chain",
    "forward_chain",
    "diversify",
    "compose_rulebase",
    "classify_structure",
    "fresh_names",
]

log = logging.getLogger(__name__)


class ChainingError(ValueError):
    pass


class PredicateMismatch(ChainingError):
    pass


class TypeMismatch(ChainingError):
    pass


class LengthOverflow(ChainingError):
    pass


class DepthOverflow(ChainingError):
    pass


def fresh_names() -> Iterator[str]:
    """Z, Z1..Z9, then the other letters, then the other letters with digits."""
    yield "Z"
    for d in range(1, 10):
        yield f"Z{d}"
    letters = [c for c in string.ascii_uppercase if c not in "XYZ"]
    yield from letters
    for d in range(1, 10):
        for c in letters:
            yield f"{c}{d}"


def _check_match(target: Fact, source: Fact) -> None:
    if target.predicate != source.predicate:
        raise PredicateMismatch(f"{source.predicate} does not match {target.predicate}")
    if target.var_types != source.var_types:
        raise TypeMismatch(
            f"{source.predicate} argument types {source.var_types} != {target.var_types}"
        )


def _bind(sub_fact: Fact, host_fact: Fact) -> dict[str, str]:
    """Positional variable binding from ``sub_fact`` onto ``host_fact``."""
    binding: dict[str, str] = {}
    for s, h in zip(sub_fact.var_names, host_fact.var_names):
        if binding.setdefault(s, h) != h:
            raise ChainingError(f"variable {s} would bind to both {binding[s]} and {h}")
    if len(set(binding.values())) != len(binding):
        raise ChainingError("binding is not injective")
    return binding


def backward_chain(
    host: Rule,
    fact_index: int,
    sub: Rule,
    vocab: Vocabulary = DEFAULT_VOCAB,
    provenance: str = "composed",
    increment_depth: bool = True,
) -> Rule:
    """Replace ``host.premise[fact_index]`` with the premise of ``sub``.

    The sub-rule's conclusion variables take the selected fact's variables;
    all other sub-rule variables are renamed to names unused by the host.
    """
    if not 0 <= fact_index < host.length:
        raise IndexError(f"fact_index {fact_index} out of range for length {host.length}")
    target = host.premise[fact_index]
    _check_match(target, sub.conclusion)
    new_length = host.length - 1 + sub.length
    if new_length > MAX_LENGTH:
        raise LengthOverflow(f"result length {new_length} exceeds {MAX_LENGTH}")
    new_depth = host.depth + 1 if increment_depth else host.depth
    if new_depth > MAX_DEPTH:
        raise DepthOverflow(f"result depth {new_depth} exceeds {MAX_DEPTH}")

    mapping = _bind(sub.conclusion, target)
    used = host.var_names()
    names = fresh_names()
    for fact in sub.premise:
        for var in fact.var_names:
            if var not in mapping:
                name = next(names)
                while name in used:
                    name = next(names)
                used.add(name)
                mapping[var] = name

    spliced = [f.rename(mapping) for f in sub.premise]
    premise = host.premise[:fact_index] + tuple(spliced) + host.premise[fact_index + 1:]
    try:
        result = host.evolve(
            premise=premise,
            depth=new_depth,
            provenance=provenance,
            structure=None,
            verbalization=None,
            verified=None,
            parent_ids=(rule_id(host), rule_id(sub)),
        )
    except RuleError as exc:
        raise ChainingError(f"chained rule is malformed: {exc}") from exc
    return result.evolve(structure=classify_structure(result, vocab))


def forward_chain(host: Rule, sub: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> Rule:
    """Replace the host conclusion by the conclusion of single-fact ``sub``."""
    if sub.length != 1:
        raise ChainingError(f"forward chaining needs a single-fact rule, got length {sub.length}")
    source = sub.premise[0]
    _check_match(host.conclusion, source)
    if set(source.var_names) != {"X", "Y"}:
        raise ChainingError("sub-rule premise must relate X and Y")
    mapping = _bind(source, host.conclusion)
    conclusion = sub.conclusion.rename(mapping)
    premise = host.premise
    if conclusion.var_names == ("Y", "X"):
        # keep the conclusion over (X, Y) by swapping X and Y rule-wide
        swap = {"X": "Y", "Y": "X"}
        conclusion = conclusion.rename(swap)
        premise = tuple(f.rename(swap) for f in premise)
    try:
        result = host.evolve(
            conclusion=conclusion,
            premise=premise,
            provenance="diversified_forward",
            structure=None,
            verbalization=None,
            verified=None,
            parent_ids=(rule_id(host), rule_id(sub)),
        )
    except RuleError as exc:
        raise ChainingError(f"chained rule is malformed: {exc}") from exc
    return result.evolve(structure=classify_structure(result, vocab))


def _matches(target: Fact, source: Fact) -> bool:
    return target.predicate == source.predicate and target.var_types == source.var_types


def diversify(
    rule: Rule, single_fact_pool: list[Rule], vocab: Vocabulary = DEFAULT_VOCAB
) -> list[Rule]:
    """At most one forward and one backward paraphrase of ``rule``.

    Backward diversification targets the first premise fact that some pool
    rule can expand. It keeps the depth, since it only paraphrases a predicate.
    """
    if any(r.length != 1 for r in single_fact_pool):
        raise ValueError("diversification pool must hold single-fact rules only")
    out = []
    for sub in single_fact_pool:
        if _matches(rule.conclusion, sub.premise[0]):
            try:
                out.append(forward_chain(rule, sub, vocab))
                break
            except ChainingError as exc:
                log.debug("forward candidate skipped: %s", exc)
    for index, fact in enumerate(rule.premise):
        backward = None
        for sub in single_fact_pool:
            if _matches(fact, sub.conclusion):
                try:
                    backward = backward_chain(rule, index, sub, vocab,
                                              provenance="diversified_backward",
                                              increment_depth=False)
                    break
                except ChainingError as exc:
                    log.debug("backward candidate skipped: %s", exc)
        if backward is not None:
            out.append(backward)
            break
    return out


def compose_rulebase(
    primitives: list[Rule],
    max_depth: int,
    max_length: int,
    seed: int,
    vocab: Vocabulary = DEFAULT_VOCAB,
) -> list[Rule]:
    """Build compositional rules of depth 1..max_depth by backward chaining.

    At each level, every rule of the previous level gets one premise fact
    drawn uniformly (under ``seed``) from the facts that some multi-fact
    primitive can expand. The fact is expanded with each matching primitive
    in input order. Expansions longer than ``max_length`` are skipped and
    duplicates are dropped by canonical serialization.
    """
    if not 0 <= max_depth <= MAX_DEPTH:
        raise ValueError(f"max_depth must be in 0..{MAX_DEPTH}")
    if not 1 <= max_length <= MAX_LENGTH:
        raise ValueError(f"max_length must be in 1..{MAX_LENGTH}")
    rng = random.Random(seed)
    subs = [p for p in primitives if p.length >= 2]
    by_conclusion: dict[tuple, list[Rule]] = {}
    for sub in subs:
        key = (sub.conclusion.predicate, sub.conclusion.var_types)
        by_conclusion.setdefault(key, []).append(sub)

    seen = {serialize_rule(p) for p in primitives}
    level = [p.evolve(depth=0) if p.depth else p for p in primitives]
    output: list[Rule] = []
    for _ in range(max_depth):
        next_level = []
        for host in level:
            candidates = [
                i for i, f in enumerate(host.premise)
                if (f.predicate, f.var_types) in by_conclusion
            ]
            if not candidates:
                continue
            idx = rng.choice(candidates)
            fact = host.premise[idx]
            for sub in by_conclusion[(fact.predicate, fact.var_types)]:
                if host.length - 1 + sub.length > max_length:
                    continue
                try:
                    composed = backward_chain(host, idx, sub, vocab)
                except ChainingError as exc:
                    log.debug("expansion skipped: %s", exc)
                    continue
                text = serialize_rule(composed)
                if text in seen:
                    continue
                seen.add(text)
                if not check_grammatical_validity(composed).passed:
                    log.warning("composed rule failed the grammar check: %s", text)
                    continue
                next_level.append(composed)
        output.extend(next_level)
        level = next_level
        if not level:
            break
    return output

