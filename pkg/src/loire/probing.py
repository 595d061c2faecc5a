"""Dual-sided rule probing: templates, CoT variants, answer parsing, scoring."""

from __future__ import annotations

import re
import statistics
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from .grammar import rule_id, serialize_fact, serialize_premise, serialize_rule
from .llm.client import CompletionRequest, ModelClient
from .prompts import (
    ANSWER_EXPLAIN_SUFFIX,
    COT_STRATEGIES,
    PROBE_LABELS,
    PROBE_TEMPLATES,
    SELF_CONSISTENCY_SUFFIX,
    THINK_ANSWER_SUFFIX,
)
from .rules import Rule, negate_conclusion
from .verbalize import verbalize_fact, verbalize_premise, verbalize_rule
from .vocab import DEFAULT_VOCAB, Vocabulary

TEMPLATE_IDS = (1, 2, 3, 4, 5)
FORMS = ("verbalized", "symbolic")
ANSWERS = ("positive", "negative", "unparseable")

DEFAULT_CORRECT_DEMO = (
    "CanDrive(Person X, Vehicle Y):- Obtain(Person X, Authorization Z), "
    "RequiredForDriving(Authorization Z, Vehicle Y).",
    "Person X holds the authorization that is required for driving Vehicle Y.",
)
DEFAULT_INCORRECT_DEMO = (
    "CanAccess(Person X, Plant Y):- BornIn(Person X, Season Z), BloomsIn(Plant Y, Season Z).",
    "a person's birth season and a plant's blooming season has no logical connection.",
)


class MissingTemplateError(ValueError):
    pass


@dataclass(frozen=True)
class ProbeInstance:
    rule_id: str
    template_id: int
    form: str
    cot: str
    original_text: str
    flipped_text: str
    positive_token: str
    negative_token: str


@dataclass(frozen=True)
class DemonstrationBlock:
    text: str
    template_id: int
    cot: str
    degenerate: bool = False


@dataclass(frozen=True)
class ProbeResult:
    rule_id: str
    template_id: int
    original_answer: str
    flipped_answer: str
    form: str = "verbalized"
    cot: str = "answer_explain"
    raw_outputs: tuple[str, ...] = ()
    correct: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "raw_outputs", tuple(self.raw_outputs))
        object.__setattr__(
            self, "correct", score_dual_side(self.original_answer, self.flipped_answer)
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["raw_outputs"] = list(self.raw_outputs)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProbeResult":
        d = {k: v for k, v in d.items() if k != "correct"}
        return cls(**d)


@dataclass(frozen=True)
class ProbeAggregate:
    per_template_accuracy: tuple[float, ...]
    mean_accuracy: float
    variance: float

    def to_dict(self) -> dict:
        return {
            "per_template_accuracy": list(self.per_template_accuracy),
            "mean_accuracy": self.mean_accuracy,
            "variance": self.variance,
        }


def _instruction(template_id: int, cot: str) -> str:
    text = PROBE_TEMPLATES[template_id]
    if cot == "answer_explain":
        return text[:-1] + ANSWER_EXPLAIN_SUFFIX
    if cot == "think_answer":
        return text + THINK_ANSWER_SUFFIX
    if cot == "self_consistency":
        return text + SELF_CONSISTENCY_SUFFIX
    raise ValueError(f"unknown CoT strategy {cot!r}")


def _rule_parts(rule: Rule, form: str, vocab: Vocabulary) -> tuple[str, str, str]:
    """(whole rule, premise clause, conclusion) in the requested form."""
    if form == "verbalized":
        return (
            verbalize_rule(rule, vocab),
            verbalize_premise(rule.premise, vocab),
            verbalize_fact(rule.conclusion, vocab),
        )
    if form == "symbolic":
        return serialize_rule(rule), serialize_premise(rule.premise), serialize_fact(rule.conclusion)
    raise ValueError(f"unknown form {form!r}")


def _query(rule: Rule, template_id: int, form: str, cot: str, vocab: Vocabulary) -> str:
    whole, premise, conclusion = _rule_parts(rule, form, vocab)
    if template_id <= 3:
        return f"Rule: {whole}"
    return _instruction(template_id, cot).format(premise=premise, conclusion=conclusion)


def _check_template(template_id: int) -> None:
    if template_id not in TEMPLATE_IDS:
        raise ValueError(f"template_id must be one of {TEMPLATE_IDS}, got {template_id}")


def build_demonstrations(
    correct_rule: Rule,
    incorrect_rule: Rule,
    template_id: int,
    cot: str = "answer_explain",
    correct_explanation: str = DEFAULT_CORRECT_DEMO[1],
    incorrect_explanation: str = DEFAULT_INCORRECT_DEMO[1],
    form: str = "verbalized",
    vocab: Vocabulary = DEFAULT_VOCAB,
) -> DemonstrationBlock:
    """Two-shot block: the correct rule first, then the incorrect one."""
    _check_template(template_id)
    pos, neg = PROBE_LABELS[template_id]
    lines = [
        "Examples:",
        _query(correct_rule, template_id, form, cot, vocab),
        f"Output: {pos}. Because {correct_explanation}",
        _query(incorrect_rule, template_id, form, cot, vocab),
        f"Output: {neg}. Because {incorrect_explanation}",
    ]
    return DemonstrationBlock(
        "\n".join(lines), template_id, cot, degenerate=correct_rule.key() == incorrect_rule.key()
    )


def default_demonstrations(template_id: int, cot: str = "answer_explain",
                           form: str = "verbalized",
                           vocab: Vocabulary = DEFAULT_VOCAB) -> DemonstrationBlock:
    from .grammar import parse_rule

    return build_demonstrations(
        parse_rule(DEFAULT_CORRECT_DEMO[0]), parse_rule(DEFAULT_INCORRECT_DEMO[0]),
        template_id, cot, DEFAULT_CORRECT_DEMO[1], DEFAULT_INCORRECT_DEMO[1], form, vocab,
    )


def _render_text(rule: Rule, template_id: int, form: str, cot: str, vocab: Vocabulary,
                 demonstrations: Optional[DemonstrationBlock]) -> str:
    parts = []
    if template_id <= 3:
        parts.append(_instruction(template_id, cot))
    if demonstrations is not None:
        parts.append(demonstrations.text)
    parts.append(_query(rule, template_id, form, cot, vocab))
    return "\n".join(parts)


def render_probe(
    rule: Rule,
    template_id: int,
    form: str = "verbalized",
    cot: str = "answer_explain",
    vocab: Vocabulary = DEFAULT_VOCAB,
    demonstrations: Optional[DemonstrationBlock] = None,
) -> ProbeInstance:
    _check_template(template_id)
    if cot not in COT_STRATEGIES:
        raise ValueError(f"unknown CoT strategy {cot!r}")
    pos, neg = PROBE_LABELS[template_id]
    return ProbeInstance(
        rule_id=rule_id(rule),
        template_id=template_id,
        form=form,
        cot=cot,
        original_text=_render_text(rule, template_id, form, cot, vocab, demonstrations),
        flipped_text=_render_text(negate_conclusion(rule, vocab), template_id, form, cot, vocab,
                                  demonstrations),
        positive_token=pos,
        negative_token=neg,
    )


_FINAL_ANSWER_RE = re.compile(r"final answer", re.IGNORECASE)


def _scan(text: str, pos: str, neg: str) -> str:
    m = re.search(rf"\b({re.escape(pos)}|{re.escape(neg)})\b", text, re.IGNORECASE)
    if m is None:
        return "unparseable"
    return "positive" if m.group(1).lower() == pos.lower() else "negative"


def parse_answer(model_output: str, template_id: int) -> str:
    """Map a model output to positive / negative / unparseable. Never raises."""
    if template_id not in PROBE_LABELS or not isinstance(model_output, str):
        return "unparseable"
    pos, neg = PROBE_LABELS[template_id]
    markers = list(_FINAL_ANSWER_RE.finditer(model_output))
    if markers:
        tail = _scan(model_output[markers[-1].end():], pos, neg)
        if tail != "unparseable":
            return tail
    return _scan(model_output, pos, neg)


def score_dual_side(original: str, flipped: str) -> bool:
    return original == "positive" and flipped == "negative"


def aggregate(results: Iterable[ProbeResult], variance: str = "population") -> ProbeAggregate:
    """Per-template accuracy, its mean, and the variance across templates."""
    totals = {t: [0, 0] for t in TEMPLATE_IDS}
    for r in results:
        totals[r.template_id][0] += r.correct
        totals[r.template_id][1] += 1
    missing = [t for t, (_, n) in totals.items() if n == 0]
    if missing:
        raise MissingTemplateError(f"no results for templates {missing}")
    acc = tuple(c / n for c, n in totals.values())
    if variance == "population":
        var = statistics.pvariance(acc)
    elif variance == "sample":
        var = statistics.variance(acc)
    else:
        raise ValueError(f"unknown variance kind {variance!r}")
    return ProbeAggregate(acc, statistics.fmean(acc), var)


def breakdown(results: Sequence[ProbeResult], rules: dict[str, Rule], by: str) -> dict:
    """Accuracy grouped by a rule attribute (length, depth, structure, polarity).

    Groups may lack some templates; their mean is taken over present ones.
    """
    groups: dict[object, dict[int, list[int]]] = {}
    for r in results:
        rule = rules.get(r.rule_id)
        if rule is None:
            continue
        per = groups.setdefault(getattr(rule, by), {})
        per.setdefault(r.template_id, []).append(int(r.correct))
    out = {}
    for key in sorted(groups, key=str):
        per_template = {t: sum(v) / len(v) for t, v in sorted(groups[key].items())}
        out[str(key)] = {
            "per_template_accuracy": per_template,
            "mean_accuracy": statistics.fmean(per_template.values()),
            "n_results": sum(len(v) for v in groups[key].values()),
        }
    return out


def run_probes(
    rules: Sequence[Rule],
    client: ModelClient,
    template_ids: Sequence[int] = TEMPLATE_IDS,
    form: str = "verbalized",
    cot: str = "answer_explain",
    vocab: Vocabulary = DEFAULT_VOCAB,
    model_name: str = "gpt-4",
    with_demonstrations: bool = True,
    max_tokens: int = 256,
) -> list[ProbeResult]:
    """Probe each rule and its flip under every template; temperature 0."""
    results = []
    demos = {
        t: default_demonstrations(t, cot, form, vocab) if with_demonstrations else None
        for t in template_ids
    }
    for rule in rules:
        for t in template_ids:
            probe = render_probe(rule, t, form, cot, vocab, demos[t])
            outputs = []
            for text in (probe.original_text, probe.flipped_text):
                req = CompletionRequest.from_prompt(model_name, text, temperature=0.0,
                                                    max_tokens=max_tokens)
                outputs.append(client.complete(req))
            results.append(ProbeResult(
                rule_id=probe.rule_id,
                template_id=t,
                original_answer=parse_answer(outputs[0], t),
                flipped_answer=parse_answer(outputs[1], t),
                form=form,
                cot=cot,
                raw_outputs=tuple(outputs),
            ))
    return results
