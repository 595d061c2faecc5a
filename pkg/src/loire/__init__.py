"""Logic rule bases: grammar, validation, chaining, probing and generation."""

from .chaining import backward_chain, compose_rulebase, diversify, forward_chain
from .grammar import RuleSyntaxError, parse_fact, parse_rule, rule_id, serialize_rule
from .rules import Fact, Rule, RuleError, TypedVariable, negate_conclusion
from .structure import classify_structure
from .validator import (
    check_grammatical_validity,
    check_primitiveness,
    check_triviality,
    filter_rules,
    run_checks,
)
from .verbalize import verbalize_fact, verbalize_rule
from .vocab import DEFAULT_VOCAB, Vocabulary

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_VOCAB",
    "Fact",
    "Rule",
    "RuleError",
    "RuleSyntaxError",
    "TypedVariable",
    "Vocabulary",
    "backward_chain",
    "check_grammatical_validity",
    "check_primitiveness",
    "check_triviality",
    "classify_structure",
    "compose_rulebase",
    "diversify",
    "filter_rules",
    "forward_chain",
    "negate_conclusion",
    "parse_fact",
    "parse_rule",
    "rule_id",
    "run_checks",
    "serialize_rule",
    "verbalize_fact",
    "verbalize_rule",
]
