"""Render rules as "If ..., then ..." sentences."""

from __future__ import annotations

from typing import Iterable

from .rules import Fact, Rule, camel_segments
from .vocab import DEFAULT_VOCAB, Vocabulary

_NEGATION_WORDS = {"Not": "not", "No": "no", "Never": "never", "Un": "not"}


def _fallback_phrase(predicate: str, vocab: Vocabulary) -> str:
    words: list[str] = []
    for i, seg in enumerate(camel_segments(predicate)):
        if seg in vocab.negation_segments and (seg != "Un" or i == 0):
            word = _NEGATION_WORDS.get(seg, seg.lower())
            if word == "not" and words and words[-1] == "can":
                words[-1] = "cannot"
                continue
            words.append(word)
        else:
            words.append(seg.lower())
    return " ".join(words)


def verbalize_fact(fact: Fact, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    a1, a2 = str(fact.arg1), str(fact.arg2)
    phrase = vocab.verbalization_lexicon.get(fact.predicate)
    if phrase is not None and "{0}" in phrase:
        return phrase.format(a1, a2)
    if phrase is None:
        phrase = _fallback_phrase(fact.predicate, vocab)
        if fact.predicate in vocab.comparison_predicates:
            phrase = f"is {phrase}"
    return f"{a1} {phrase} {a2}"


def verbalize_premise(facts: Iterable[Fact], vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    """The "If ..." clause, without the trailing "then" part."""
    return "If " + " and ".join(verbalize_fact(f, vocab) for f in facts)


def verbalize_rule(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> str:
    return (
        f"{verbalize_premise(rule.premise, vocab)}, "
        f"then {verbalize_fact(rule.conclusion, vocab)}."
    )


def split_verbalization(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> tuple[str, str]:
    """(premise clause, conclusion sentence) for a rule.

    Prefers the rule's attached verbalization when it has the If/then shape.
    """
    text = rule.verbalization
    if text and text.startswith("If ") and text.count(", then ") == 1:
        premise, conclusion = text.split(", then ")
        conclusion = conclusion.rstrip(". ")
        return premise, conclusion[:1].upper() + conclusion[1:]
    return verbalize_premise(rule.premise, vocab), verbalize_fact(rule.conclusion, vocab)
