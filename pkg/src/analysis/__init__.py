"""Optimality and blowup analysis on bounded products."""

from src.analysis.blowup import (
    BlowupBoundViolation,
    BlowupReport,
    count_full_bound,
    count_stack_strings,
    measure_blowup,
    reachable_stack_counts,
)
from src.analysis.k_stack import INCONCLUSIVE, INSUFFICIENT, SUFFICIENT, KStackReport, check_k_stack_optimality
from src.analysis.value_iteration import NonFiniteValue, ValueSolution, value_iteration

__all__ = [
    "BlowupBoundViolation",
    "BlowupReport",
    "INCONCLUSIVE",
    "INSUFFICIENT",
    "KStackReport",
    "NonFiniteValue",
    "SUFFICIENT",
    "ValueSolution",
    "check_k_stack_optimality",
    "count_full_bound",
    "count_stack_strings",
    "measure_blowup",
    "reachable_stack_counts",
    "value_iteration",
]
