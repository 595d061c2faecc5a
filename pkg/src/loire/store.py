"""JSONL rule-base persistence, rule-base statistics, and external-data import."""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .grammar import parse_rule, rule_id, serialize_rule
from .rules import DOMAINS, MAX_DEPTH, PROVENANCES, STRUCTURES, Rule, RuleError
from .structure import classify_structure
from .verbalize import verbalize_rule
from .vocab import DEFAULT_VOCAB, Vocabulary

log = logging.getLogger(__name__)

RECORD_FIELDS = (
    "id", "symbolic", "verbalized", "domain", "depth", "length",
    "structure", "polarity", "provenance", "parent_ids", "verified",
)
CATEGORIES = ("single_fact", "multi_fact", "intermediate", "depth_1", "depth_2", "depth_3")
PRIMITIVE_CATEGORIES = CATEGORIES[:3]
COMPOSITIONAL_CATEGORIES = CATEGORIES[3:]
CATEGORY_LABELS = {
    "single_fact": "Single-fact primitive",
    "multi_fact": "Multi-fact primitive",
    "intermediate": "Intermediate primitive",
    "depth_1": "Composition depth 1",
    "depth_2": "Composition depth 2",
    "depth_3": "Composition depth 3",
}


class RecordError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


@dataclass(frozen=True)
class RuleRecord:
    id: str
    symbolic: str
    verbalized: str
    domain: Optional[str]
    depth: int
    length: int
    structure: str
    polarity: str
    provenance: str
    parent_ids: tuple[str, ...] = ()
    verified: Optional[bool] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent_ids", tuple(self.parent_ids))

    def to_dict(self) -> dict:
        out = {name: getattr(self, name) for name in RECORD_FIELDS}
        out["parent_ids"] = list(self.parent_ids)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RuleRecord":
        missing = [k for k in RECORD_FIELDS if k not in data]
        if missing:
            raise ValueError(f"missing fields: {', '.join(missing)}")
        extra = sorted(set(data) - set(RECORD_FIELDS))
        if extra:
            raise ValueError(f"unknown fields: {', '.join(extra)}")
        return cls(**{k: data[k] for k in RECORD_FIELDS})

    def to_rule(self, vocab: Vocabulary = DEFAULT_VOCAB) -> Rule:
        return parse_rule(
            self.symbolic, vocab,
            domain=self.domain, depth=self.depth, structure=self.structure,
            provenance=self.provenance, verified=self.verified,
            verbalization=self.verbalized, parent_ids=self.parent_ids,
        )

    def problems(self, vocab: Vocabulary = DEFAULT_VOCAB) -> list[str]:
        """Mismatches between the stored metadata and the parsed rule."""
        try:
            rule = parse_rule(self.symbolic, vocab)
        except RuleError as exc:
            return [f"symbolic does not parse: {exc}"]
        out = []
        if self.id != rule_id(rule):
            out.append("id does not match the canonical serialization")
        if self.length != rule.length:
            out.append(f"length {self.length} != premise count {rule.length}")
        if self.polarity != rule.polarity:
            out.append(f"polarity {self.polarity!r} != {rule.polarity!r}")
        if self.structure != classify_structure(rule, vocab):
            out.append(f"structure {self.structure!r} != {classify_structure(rule, vocab)!r}")
        if self.domain is not None and self.domain not in DOMAINS:
            out.append(f"unknown domain {self.domain!r}")
        if not isinstance(self.depth, int) or not 0 <= self.depth <= MAX_DEPTH:
            out.append(f"depth {self.depth!r} outside 0..{MAX_DEPTH}")
        if self.provenance not in PROVENANCES:
            out.append(f"unknown provenance {self.provenance!r}")
        if self.structure not in STRUCTURES:
            out.append(f"unknown structure {self.structure!r}")
        return out


def record_from_rule(rule: Rule, vocab: Vocabulary = DEFAULT_VOCAB) -> RuleRecord:
    return RuleRecord(
        id=rule_id(rule),
        symbolic=serialize_rule(rule),
        verbalized=rule.verbalization or verbalize_rule(rule, vocab),
        domain=rule.domain,
        depth=rule.depth,
        length=rule.length,
        structure=rule.structure or classify_structure(rule, vocab),
        polarity=rule.polarity,
        provenance=rule.provenance,
        parent_ids=rule.parent_ids,
        verified=rule.verified,
    )


def dumps_record(record: RuleRecord) -> str:
    return json.dumps(record.to_dict(), ensure_ascii=False)


def save_rulebase(records: Iterable[RuleRecord], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(dumps_record(rec) + "\n")


def validate_rulebase(
    path, vocab: Vocabulary = DEFAULT_VOCAB
) -> tuple[list[RuleRecord], list[RecordError]]:
    """Read every line; return the valid records and the per-line errors."""
    records, errors = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = RuleRecord.from_dict(json.loads(line))
            except (ValueError, TypeError) as exc:
                errors.append(RecordError(lineno, f"malformed record: {exc}"))
                continue
            problems = rec.problems(vocab)
            if problems:
                errors.append(RecordError(lineno, "; ".join(problems)))
                continue
            records.append(rec)
    return records, errors


def load_rulebase(path, strict: bool = False, vocab: Vocabulary = DEFAULT_VOCAB) -> list[RuleRecord]:
    """Valid records of a JSONL rule base; with ``strict`` the first error raises."""
    records, errors = validate_rulebase(path, vocab)
    for err in errors:
        log.warning("%s: %s", path, err)
    if strict and errors:
        raise errors[0]
    return records


class RuleStore:
    """Append-only JSONL store; appends are serialized by a lock."""

    def __init__(self, path, vocab: Vocabulary = DEFAULT_VOCAB):
        self.path = Path(path)
        self.vocab = vocab
        self._lock = threading.Lock()

    def records(self) -> list[RuleRecord]:
        if not self.path.exists():
            return []
        return load_rulebase(self.path, vocab=self.vocab)

    def append(self, records: Sequence[RuleRecord]) -> None:
        if not records:
            return
        with self._lock, self.path.open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(dumps_record(rec) + "\n")


class MemoryStore:
    def __init__(self, records: Iterable[RuleRecord] = ()):
        self._records = list(records)
        self._lock = threading.Lock()

    def records(self) -> list[RuleRecord]:
        return list(self._records)

    def append(self, records: Sequence[RuleRecord]) -> None:
        with self._lock:
            self._records.extend(records)


# ------------------------------------------------------------------ stats

def category_of(record: RuleRecord) -> str:
    if record.depth >= 1:
        return f"depth_{record.depth}"
    if record.provenance == "intermediate":
        return "intermediate"
    return "single_fact" if record.length == 1 else "multi_fact"


@dataclass
class StatsTable:
    counts: dict[str, dict[str, int]] = field(default_factory=dict)  # category -> domain -> n
    domains: tuple[str, ...] = DOMAINS

    def row_total(self, category: str) -> int:
        return sum(self.counts[category].values())

    def column_total(self, domain: str, categories: Sequence[str] = CATEGORIES) -> int:
        return sum(self.counts[c].get(domain, 0) for c in categories)

    @property
    def primitive(self) -> int:
        return sum(self.row_total(c) for c in PRIMITIVE_CATEGORIES)

    @property
    def compositional(self) -> int:
        return sum(self.row_total(c) for c in COMPOSITIONAL_CATEGORIES)

    @property
    def total(self) -> int:
        return self.primitive + self.compositional

    def to_dict(self) -> dict:
        return {
            "counts": self.counts,
            "domains": list(self.domains),
            "primitive": self.primitive,
            "compositional": self.compositional,
            "total": self.total,
        }

    def render(self) -> str:
        cols = list(self.domains) + ["total"]
        width = max(len(label) for label in CATEGORY_LABELS.values()) + 2
        lines = ["".ljust(width) + "".join(c.rjust(15) for c in cols)]

        def row(label: str, values: list[int]) -> str:
            return label.ljust(width) + "".join(str(v).rjust(15) for v in values)

        for group, cats in (("Primitive", PRIMITIVE_CATEGORIES),
                            ("Compositional", COMPOSITIONAL_CATEGORIES)):
            for c in cats:
                vals = [self.counts[c].get(d, 0) for d in self.domains]
                lines.append(row(CATEGORY_LABELS[c], vals + [self.row_total(c)]))
            vals = [self.column_total(d, cats) for d in self.domains]
            lines.append(row(f"{group} total", vals + [sum(vals)]))
        vals = [self.column_total(d) for d in self.domains]
        lines.append(row("Overall", vals + [self.total]))
        return "\n".join(lines)


def stats(records: Iterable[RuleRecord]) -> StatsTable:
    """Counts by category and domain; records without a domain go under "unknown"."""
    records = list(records)
    domains = list(DOMAINS)
    if any(r.domain is None for r in records):
        domains.append("unknown")
    counts = {c: {d: 0 for d in domains} for c in CATEGORIES}
    for rec in records:
        counts[category_of(rec)][rec.domain or "unknown"] += 1
    return StatsTable(counts, tuple(domains))


# ------------------------------------------------------------------ import

_RULE_KEYS = ("symbolic", "s_rule", "symbolic_rule", "prolog", "rule", "logic_rule")
_VERBAL_KEYS = ("verbalized", "v_rule", "verbalized_rule", "natural_language", "nl_rule", "text")
_DOMAIN_KEYS = ("domain", "domain_name")
_DEPTH_KEYS = ("depth", "compositional_depth", "composition_depth", "comp_depth")
_KIND_KEYS = ("category", "rule_type", "type", "kind")
_DOMAIN_ALIASES = {
    "object affordance": "affordance",
    "affordance": "affordance",
    "accessibility": "accessibility",
    "interaction": "interaction",
    "location": "location",
    "need": "need",
    "person's need": "need",
    "person need": "need",
}


def _first(data: dict, keys: Sequence[str]):
    for k in keys:
        if k in data and data[k] not in (None, ""):
            return data[k]
    return None


def _import_domain(value) -> Optional[str]:
    if value is None:
        return None
    return _DOMAIN_ALIASES.get(str(value).strip().lower().replace("_", " "))


def import_record(data: dict, vocab: Vocabulary = DEFAULT_VOCAB) -> RuleRecord:
    """Map one externally formatted rule entry onto a RuleRecord.

    Field names are matched against common spellings; an "intermediate"
    marker in the kind field sets the intermediate provenance.
    """
    text = _first(data, _RULE_KEYS)
    if text is None:
        raise ValueError("no rule text field")
    depth = _first(data, _DEPTH_KEYS)
    kind = str(_first(data, _KIND_KEYS) or "").lower()
    provenance = "intermediate" if "intermediate" in kind else "imported"
    if depth is None:
        digits = [ch for ch in kind if ch.isdigit()]
        depth = int(digits[0]) if "comp" in kind and digits else 0
    rule = parse_rule(
        str(text).strip(), vocab,
        domain=_import_domain(_first(data, _DOMAIN_KEYS)),
        depth=int(depth),
        provenance=provenance,
        verbalization=_first(data, _VERBAL_KEYS),
    )
    return record_from_rule(rule, vocab)


def import_rulebase(path, vocab: Vocabulary = DEFAULT_VOCAB) -> tuple[list[RuleRecord], list[RecordError]]:
    """Import a JSON array or JSONL file of externally formatted rules."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = list(enumerate(json.loads(stripped), start=1))
    else:
        rows = [(i, line) for i, line in enumerate(text.splitlines(), start=1) if line.strip()]
    records, errors = [], []
    for lineno, row in rows:
        try:
            data = json.loads(row) if isinstance(row, str) else row
            records.append(import_record(data, vocab))
        except (ValueError, TypeError) as exc:
            errors.append(RecordError(lineno, str(exc)))
    return records, errors
