"""Parser and canonical printer for the Prolog-style rule subset.

Grammar::

    rule  := fact ":-" fact ("," fact)* ("." | ";")?
    fact  := Name "(" arg "," arg ")"
    arg   := TypeWord TypeWord? Var
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Optional

from .rules import (
    VAR_NAME_RE,
    ConclusionVariableError,
    Fact,
    Rule,
    RuleError,
    TypedVariable,
)
from .structure import classify_structure
from .vocab import DEFAULT_VOCAB, Vocabulary

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>:-|[(),.;]))")


class RuleSyntaxError(RuleError):
    def __init__(self, message: str, position: int, expected: str):
        super().__init__(f"{message} at position {position} (expected {expected})")
        self.position = position
        self.expected = expected


@dataclass(frozen=True)
class _Token:
    kind: str  # "name", "punct" or "eof"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = len(text) - len(text[pos:].lstrip())
            if rest == len(text):
                break
            raise RuleSyntaxError(f"unexpected character {text[rest]!r}", rest, "a token")
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _fail(self, expected: str):
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise RuleSyntaxError(f"unexpected {found}", tok.pos, expected)

    def expect(self, punct: str) -> None:
        if self.tok.kind == "punct" and self.tok.text == punct:
            self.i += 1
        else:
            self._fail(repr(punct))

    def accept(self, punct: str) -> bool:
        if self.tok.kind == "punct" and self.tok.text == punct:
            self.i += 1
            return True
        return False

    def arg(self) -> TypedVariable:
        words = []
        start = self.tok.pos
        while self.tok.kind == "name":
            words.append(self.tok.text)
            self.i += 1
            if len(words) > 1 and VAR_NAME_RE.fullmatch(words[-1]):
                break
        if len(words) < 2:
            self._fail("a type phrase followed by a variable")
        if not VAR_NAME_RE.fullmatch(words[-1]):
            raise RuleSyntaxError(f"bad variable name {words[-1]!r}", start, "a variable like X or Z1")
        try:
            return TypedVariable(words[-1], " ".join(words[:-1]))
        except RuleError as exc:
            raise RuleSyntaxError(str(exc), start, "a capitalized type of one or two words") from None

    def fact(self) -> Fact:
        if self.tok.kind != "name":
            self._fail("a predicate name")
        tok = self.tok
        self.i += 1
        self.expect("(")
        a1 = self.arg()
        self.expect(",")
        a2 = self.arg()
        self.expect(")")
        try:
            return Fact(tok.text, a1, a2)
        except RuleError as exc:
            raise RuleSyntaxError(str(exc), tok.pos, "a camel-case predicate") from None

    def fact_list(self) -> list[Fact]:
        facts = [self.fact()]
        while self.accept(","):
            facts.append(self.fact())
        return facts

    def end(self) -> None:
        self.accept(".") or self.accept(";")
        if self.tok.kind != "eof":
            self._fail("end of rule")


def parse_fact(text: str) -> Fact:
    p = _Parser(text)
    fact = p.fact()
    p.end()
    return fact


def parse_facts(text: str) -> list[Fact]:
    """Parse a comma-separated fact list such as a bare premise."""
    p = _Parser(text)
    facts = p.fact_list()
    p.end()
    return facts


def parse_rule(text: str, vocab: Vocabulary = DEFAULT_VOCAB, **metadata) -> Rule:
    """Parse one ``Conclusion:- Premise.`` rule.

    Extra keyword arguments (domain, depth, provenance, ...) are passed to the
    Rule constructor.
    """
    p = _Parser(text)
    conclusion = p.fact()
    p.expect(":-")
    premise = p.fact_list()
    p.end()
    if conclusion.var_names != ("X", "Y"):
        raise ConclusionVariableError(
            f"conclusion variables must be X, Y; got {', '.join(conclusion.var_names)}"
        )
    metadata.setdefault("provenance", "imported")
    rule = Rule(conclusion, tuple(premise), **metadata)
    if rule.structure is None:
        rule = rule.evolve(structure=classify_structure(rule, vocab))
    return rule


def serialize_fact(fact: Fact) -> str:
    return str(fact)


def serialize_premise(facts) -> str:
    return ", ".join(serialize_fact(f) for f in facts)


def serialize_rule(rule: Rule) -> str:
    return f"{serialize_fact(rule.conclusion)}:- {serialize_premise(rule.premise)}."


def rule_id(rule_or_text, vocab: Optional[Vocabulary] = None) -> str:
    """128-bit hex digest of the canonical serialization."""
    if isinstance(rule_or_text, str):
        rule_or_text = parse_rule(rule_or_text, vocab or DEFAULT_VOCAB)
    text = serialize_rule(rule_or_text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:32]
