"""Counting reward automata and their relation to pushdown machines."""

from .cra import (
    CRA,
    CRATransition,
    CounterConfiguration,
    CounterMachine,
    CraSpec,
    HelperStateClash,
    MultiCounterUnsupported,
    NegativeCounter,
    cra_step,
    run_counter_word,
)
from .equivalence import EquivalenceReport, check_reward_equivalence, generate_words
from .growth import PathEncodingCRA, compare_growth, measure_counter_growth
from .translation import helper_state_count, translate_cra_to_pdrm

__all__ = [
    "CRA",
    "CRATransition",
    "CounterConfiguration",
    "CounterMachine",
    "CraSpec",
    "EquivalenceReport",
    "HelperStateClash",
    "MultiCounterUnsupported",
    "NegativeCounter",
    "PathEncodingCRA",
    "check_reward_equivalence",
    "compare_growth",
    "cra_step",
    "generate_words",
    "helper_state_count",
    "measure_counter_growth",
    "run_counter_word",
    "translate_cra_to_pdrm",
]
