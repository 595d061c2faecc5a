from __future__ import annotations

from .rules import Rule
from .vocab import DEFAULT_VOCAB, Vocabulary


def classify_structure(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    """Tag a rule as single, transitive, disjunctive or disjunctive_transitive.

    A comparison fact is one whose predicate is a comparison predicate and
    whose two argument types are both common properties. Rules without such
    facts are transitive chains. With comparisons present, the rule is
    disjunctive when every other fact touches X or Y directly.
    """
    if rule.length == 1:
        return "single"
    comparisons = []
    others = []
    for fact in rule.premise:
        if fact.predicate in vocab.comparison_predicates and all(
            t in vocab.common_properties for t in fact.var_types
        ):
            comparisons.append(fact)
        else:
            others.append(fact)
    if not comparisons:
        return "transitive"
    if all({"X", "Y"} & set(f.var_names) for f in others):
        return "disjunctive"
    return "disjunctive_transitive"
