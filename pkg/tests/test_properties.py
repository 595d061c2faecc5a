import itertools
import random

import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from loire.chaining import LengthOverflow, backward_chain, compose_rulebase, forward_chain
from loire.distillery import bleu, build_instruction_dataset, self_bleu, tokenize
from loire.grammar import parse_rule, serialize_rule
from loire.probing import TEMPLATE_IDS, parse_answer
from loire.rules import Rule, is_negated, negate_predicate, variable_types
from loire.store import RuleRecord, record_from_rule
from loire.structure import classify_structure
from loire.validator import (
    check_grammatical_validity,
    check_primitiveness,
    check_triviality,
)
from loire.verbalize import verbalize_rule
from loire.vocab import DEFAULT_VOCAB

from rulegen import random_chain_pair, random_predicate, random_rule

rules = st.randoms(use_true_random=False).map(random_rule)
chain_pairs = st.randoms(use_true_random=False).map(random_chain_pair)
words = st.text(alphabet="abcdefghij .,", min_size=1, max_size=40)
settings.register_profile("default", max_examples=150, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@given(rules)
def test_roundtrip(rule):
    text = serialize_rule(rule)
    again = parse_rule(text)
    assert again.key() == rule.key()
    assert serialize_rule(again) == text


@given(st.randoms(use_true_random=False), st.booleans())
def test_negation_is_involution(rng, negated):
    pred = random_predicate(rng, negated)
    assert is_negated(pred) is negated
    once = negate_predicate(pred)
    assert is_negated(once) is not negated
    assert negate_predicate(once) == pred


@given(rules)
def test_polarity_matches_segments(rule):
    from loire.rules import camel_segments

    segs = camel_segments(rule.conclusion.predicate)
    has_segment = any(s in ("Not", "No", "Never") for s in segs) or segs[0] == "Un"
    assert (rule.polarity == "negative") is has_segment


@given(rules)
def test_verbalization_shape(rule):
    text = verbalize_rule(rule)
    assert text.startswith("If ")
    assert text.count(", then ") == 1


@given(rules)
def test_variable_types_single_valued(rule):
    types = variable_types(rule.facts)
    for fact in rule.facts:
        for arg in fact.args:
            assert types[arg.var_name] == arg.var_type


@given(rules)
def test_generated_rules_are_grammatical(rule):
    assert check_grammatical_validity(rule).passed


@given(rules)
def test_check_order_independence(rule):
    checks = [check_grammatical_validity, check_primitiveness, check_triviality]
    expected = None
    for order in itertools.permutations(checks):
        codes = set()
        for check in order:
            codes.update(check(rule).codes)
        expected = codes if expected is None else expected
        assert codes == expected


@given(rules, st.data())
def test_removing_facts_never_fixes_missing_xy(rule, data):
    assume(rule.length >= 2)
    drop = data.draw(st.integers(0, rule.length - 1))
    smaller = rule.evolve(premise=rule.premise[:drop] + rule.premise[drop + 1:])
    before = set(check_grammatical_validity(rule).codes) & {"missing_X", "missing_Y"}
    after = set(check_grammatical_validity(smaller).codes) & {"missing_X", "missing_Y"}
    assert before <= after


@given(rules)
def test_primitive_rules_are_short(rule):
    if check_primitiveness(rule).passed:
        assert rule.length <= 3


@given(chain_pairs)
def test_backward_chain_arithmetic_and_validity(pair):
    host, index, sub = pair
    expected = host.length + sub.length - 1
    if expected > 6:
        with pytest.raises(LengthOverflow):
            backward_chain(host, index, sub)
        return
    result = backward_chain(host, index, sub)
    assert result.length == expected
    assert result.depth == host.depth + 1
    assert check_grammatical_validity(result).passed


@given(rules, st.randoms(use_true_random=False))
def test_forward_chain_keeps_premise(rule, rng):
    c = rule.conclusion
    sub = parse_rule(f"{random_predicate(rng)}({c.arg1.var_type} X, {c.arg2.var_type} Y):- {c}.")
    result = forward_chain(rule, sub)
    assert result.premise == rule.premise
    assert result.length == rule.length and result.depth == rule.depth


@given(rules, st.randoms(use_true_random=False))
def test_structure_stable_under_reordering(rule, rng):
    shuffled = list(rule.premise)
    rng.shuffle(shuffled)
    assert classify_structure(rule) == classify_structure(rule.evolve(premise=tuple(shuffled)))


@settings(max_examples=25)
@given(st.lists(rules, min_size=2, max_size=8), st.integers(0, 1000))
def test_compose_deterministic(primitives, seed):
    a = compose_rulebase(primitives, 3, 6, seed)
    b = compose_rulebase(primitives, 3, 6, seed)
    assert [serialize_rule(r) for r in a] == [serialize_rule(r) for r in b]
    assert all(r.depth <= 3 and r.length <= 6 for r in a)


@given(words, st.lists(words, min_size=1, max_size=3))
def test_bleu_bounds(candidate, references):
    assert 0.0 <= bleu(candidate, references) <= 1.0


@given(words)
def test_bleu_identity(text):
    assume(tokenize(text))
    assert bleu(text, [text]) == pytest.approx(1.0, abs=1e-12)


@given(st.lists(words, min_size=2, max_size=4), st.randoms(use_true_random=False))
def test_self_bleu_permutation_invariant(premises, rng):
    shuffled = list(premises)
    rng.shuffle(shuffled)
    assert self_bleu(shuffled) == pytest.approx(self_bleu(premises), abs=1e-12)


@settings(max_examples=30)
@given(st.lists(rules, max_size=10), st.integers(0, 100))
def test_dataset_counts_and_determinism(rule_list, seed):
    out = build_instruction_dataset(rule_list, "all_prefix_splits", seed)
    tasks = [i.task for i in out]
    assert tasks.count("conclusion_generation") == len(rule_list)
    assert tasks.count("premise_completion") == sum(max(0, r.length - 1) for r in rule_list)
    again = build_instruction_dataset(rule_list, "all_prefix_splits", seed)
    assert [i.to_dict() for i in out] == [i.to_dict() for i in again]


@given(rules, st.sampled_from(["affordance", "need", None]), st.integers(0, 3))
def test_record_roundtrip(rule, domain, depth):
    rec = record_from_rule(rule.evolve(domain=domain, depth=depth))
    assert RuleRecord.from_dict(rec.to_dict()) == rec
    assert rec.problems() == []
    assert rec.to_rule().key() == rule.key()


@given(st.text(max_size=80), st.integers(-2, 8))
def test_parse_answer_total(text, template_id):
    assert parse_answer(text, template_id) in ("positive", "negative", "unparseable")
