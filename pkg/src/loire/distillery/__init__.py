"""Instruction-tuning data and generation metrics."""

from .dataset import (
    FACT_BUCKETS,
    SPLIT_POLICIES,
    TASKS,
    InstructionInstance,
    build_instruction_dataset,
    fact_bucket,
    read_instances,
    write_instances,
)
from .metrics import (
    GenEvalReport,
    avg_fact_count,
    bleu,
    count_facts,
    evaluate_generation,
    self_bleu,
    tokenize,
)

__all__ = [
    "FACT_BUCKETS",
    "SPLIT_POLICIES",
    "TASKS",
    "GenEvalReport",
    "InstructionInstance",
    "avg_fact_count",
    "bleu",
    "build_instruction_dataset",
    "count_facts",
    "evaluate_generation",
    "fact_bucket",
    "read_instances",
    "self_bleu",
    "tokenize",
    "write_instances",
]
