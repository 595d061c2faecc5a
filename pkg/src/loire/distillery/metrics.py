"""Sentence BLEU, self-BLEU and fact counting for generated rules."""

from __future__ import annotations

import logging
import math
import re
from collections import Counter
from dataclasses import asdict, dataclass
from statistics import fmean
from typing import Mapping, Optional, Sequence, Union

from ..grammar import parse_facts
from ..rules import RuleError
from .dataset import TASKS, InstructionInstance

log = logging.getLogger(__name__)

EPSILON = 0.1
_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def tokenize(text: str) -> list[str]:
    """Lowercased words, with each punctuation mark as its own token."""
    return _TOKEN_RE.findall(text.lower())


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: str, references: Sequence[str], max_n: int = 4, smoothing: bool = True) -> float:
    """Sentence BLEU with clipped n-gram precision and a brevity penalty.

    Orders longer than the candidate are left out of the geometric mean.
    With smoothing, a zero clipped count becomes ``EPSILON`` over the
    candidate's n-gram total.
    """
    if max_n < 1:
        raise ValueError("max_n must be at least 1")
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references]
    refs = [r for r in refs if r]
    if not cand or not refs:
        log.warning("empty candidate or references; BLEU is 0")
        return 0.0

    log_sum = 0.0
    orders = 0
    for n in range(1, max_n + 1):
        counts = _ngrams(cand, n)
        total = sum(counts.values())
        if total == 0:
            break
        max_ref = Counter()
        for ref in refs:
            max_ref |= _ngrams(ref, n)
        clipped = sum(min(c, max_ref[g]) for g, c in counts.items())
        if clipped == 0:
            if not smoothing:
                return 0.0
            clipped = EPSILON
        log_sum += math.log(clipped / total)
        orders += 1

    c = len(cand)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    bp = 1.0 if c > r else math.exp(1 - r / c)
    return min(1.0, bp * math.exp(log_sum / orders))


def self_bleu(premises: Sequence[str], max_n: int = 4, smoothing: bool = True) -> float:
    """Mean BLEU of each premise against the others; higher means less diverse."""
    if len(premises) < 2:
        raise ValueError("self-BLEU needs at least two premises")
    return fmean(
        bleu(p, [q for j, q in enumerate(premises) if j != i], max_n, smoothing)
        for i, p in enumerate(premises)
    )


def _top_level_groups(text: str) -> int:
    depth, groups = 0, 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth = max(0, depth - 1)
        elif ch == "," and depth == 0:
            groups += 1
    return groups


def count_facts(premise: str) -> tuple[int, bool]:
    """(fact count, parsed cleanly); unparseable text falls back to comma groups."""
    text = premise.strip().rstrip(";.").strip()
    try:
        return len(parse_facts(text)), True
    except RuleError:
        return _top_level_groups(text), False


def avg_fact_count(premises: Sequence[str]) -> float:
    if not premises:
        return 0.0
    counts = []
    for p in premises:
        n, ok = count_facts(p)
        if not ok:
            log.warning("premise did not parse; counted %d comma groups: %r", n, p)
        counts.append(n)
    return fmean(counts)


@dataclass
class GenEvalReport:
    task: str
    bleu: float
    self_bleu: Optional[float] = None
    avg_fact_count: Optional[float] = None
    n_evaluated: int = 0
    n_skipped: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _lines(output: Union[str, Sequence[str]]) -> list[str]:
    if isinstance(output, str):
        return [line.strip() for line in output.splitlines() if line.strip()]
    return [o.strip() for o in output if o and o.strip()]


def evaluate_generation(
    outputs: Mapping[str, Union[str, Sequence[str]]],
    references: Sequence[InstructionInstance],
    task: str,
    field: str = "prolog",
) -> GenEvalReport:
    """Macro-average metrics over the task's instances, matched by id.

    For premise generation each output holds several premises (one per line);
    every premise is scored against all reference premises, and self-BLEU and
    fact counts are taken per instance before averaging.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}")
    if field not in ("prolog", "natural_language"):
        raise ValueError("field must be 'prolog' or 'natural_language'")
    bleus, selfs, facts = [], [], []
    skipped = 0
    for inst in references:
        if inst.task != task:
            continue
        ref_text = inst.output_symbolic if field == "prolog" else inst.output_verbalized
        generated = _lines(outputs.get(inst.id) or "")
        if not generated:
            skipped += 1
            continue
        if task == "premise_generation":
            refs = _lines(ref_text)
            bleus.append(fmean(bleu(g, refs) for g in generated))
            if len(generated) >= 2:
                selfs.append(self_bleu(generated))
            if field == "prolog":
                facts.append(avg_fact_count(generated))
        else:
            bleus.append(bleu("\n".join(generated), [ref_text]))
    is_pg = task == "premise_generation"
    return GenEvalReport(
        task=task,
        bleu=fmean(bleus) if bleus else 0.0,
        self_bleu=(fmean(selfs) if selfs else None) if is_pg else None,
        avg_fact_count=(fmean(facts) if facts else None) if is_pg else None,
        n_evaluated=len(bleus),
        n_skipped=skipped,
    )
