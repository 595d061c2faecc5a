import pytest

from loire.rules import (
    ConclusionVariableError,
    Fact,
    InconsistentTypeError,
    Rule,
    RuleError,
    TypedVariable,
    camel_segments,
    is_negated,
    negate_conclusion,
    negate_predicate,
    negation_index,
    polarity_of,
)
from loire.grammar import parse_fact, parse_rule
from loire.vocab import DEFAULT_VOCAB, Vocabulary


def tv(t, v):
    return TypedVariable(v, t)


def test_camel_segments():
    assert camel_segments("CanNotEat") == ["Can", "Not", "Eat"]
    assert camel_segments("RequiredForCooking") == ["Required", "For", "Cooking"]
    assert camel_segments("IsHTMLPage") == ["Is", "HTML", "Page"]


@pytest.mark.parametrize(
    "pred, negated",
    [
        ("CanNotEat", True),
        ("NeverVisited", True),
        ("HasNoAccess", True),
        ("UnableTo", False),  # "Unable" is one segment, not "Un" + "able"
        ("UnLock", True),
        ("CanUnLock", False),  # "Un" counts only as a leading segment
        ("Nothing", False),
        ("Notice", False),
        ("CanEat", False),
    ],
)
def test_segment_exact_negation(pred, negated):
    assert is_negated(pred) is negated


@pytest.mark.parametrize(
    "pred, expected",
    [
        ("CanEat", "CanNotEat"),
        ("CanNotEat", "CanEat"),
        ("NeedToConsume", "NeedNotToConsume"),
        ("LocatedIn", "NotLocatedIn"),
        ("NotLocatedIn", "LocatedIn"),
        ("CanBeAdaptedFrom", "CanNotBeAdaptedFrom"),
    ],
)
def test_negate_predicate(pred, expected):
    assert negate_predicate(pred) == expected


def test_negation_index():
    assert negation_index("CanNotEat") == 1
    assert negation_index("CanEat") is None


def test_typed_variable_validation():
    with pytest.raises(RuleError):
        TypedVariable("x", "Person")
    with pytest.raises(RuleError):
        TypedVariable("X", "person")
    with pytest.raises(RuleError):
        TypedVariable("X", "Very Long Type")
    assert TypedVariable("Z1", "Natural Place").var_type == "Natural Place"


def test_fact_str_and_rename():
    f = Fact("Contains", tv("Food", "Y"), tv("Substance", "Z"))
    assert str(f) == "Contains(Food Y, Substance Z)"
    assert str(f.rename({"Z": "Z2"})) == "Contains(Food Y, Substance Z2)"


def test_rule_requires_xy_conclusion():
    premise = (Fact("P", tv("Person", "X"), tv("Food", "Y")),)
    with pytest.raises(ConclusionVariableError):
        Rule(Fact("Q", tv("Person", "Y"), tv("Food", "X")), premise)


def test_rule_length_bounds():
    c = Fact("Q", tv("Person", "X"), tv("Food", "Y"))
    with pytest.raises(RuleError):
        Rule(c, ())
    facts = tuple(Fact("P", tv("Person", "X"), tv("Food", "Y")) for _ in range(7))
    with pytest.raises(RuleError):
        Rule(c, facts)


def test_rule_inconsistent_types():
    with pytest.raises(InconsistentTypeError):
        parse_rule("Q(Person X, Food Y):- P(Animal X, Food Y).")


def test_rule_enums_checked():
    with pytest.raises(RuleError):
        parse_rule("Q(Person X, Food Y):- P(Person X, Food Y).", domain="weather")
    with pytest.raises(RuleError):
        parse_rule("Q(Person X, Food Y):- P(Person X, Food Y).", depth=4)


def test_negate_conclusion_flips_polarity_and_clears_verbalization():
    rule = parse_rule("CanEat(Person X, Food Y):- Bought(Person X, Food Y).",
                      verbalization="If Person X bought Food Y, then Person X can eat Food Y.")
    flipped = negate_conclusion(rule)
    assert flipped.conclusion.predicate == "CanNotEat"
    assert flipped.verbalization is None
    assert polarity_of(rule) == "positive" and polarity_of(flipped) == "negative"
    assert negate_conclusion(flipped).key() == rule.key()


def test_custom_vocabulary_negation():
    vocab = Vocabulary(negation_segments=("Not", "Nie"))
    assert is_negated("CanNieEat", vocab)
    assert not is_negated("CanNeverEat", vocab)


def test_parse_fact_roundtrip():
    f = parse_fact("BiggerThan(Age Z1, Age Z2)")
    assert f.var_types == ("Age", "Age")
    assert str(f) == "BiggerThan(Age Z1, Age Z2)"


def test_vocab_sizes():
    assert len(DEFAULT_VOCAB.abstract_objects) == 32
    assert len(DEFAULT_VOCAB.common_properties) == 18
    assert len(DEFAULT_VOCAB.primitive_types) == 50
