"""Pushdown reward machines: types, guards and small-step semantics."""

from .errors import (
    EmptyAlphabet,
    EpsilonDivergence,
    FinalStateOverlap,
    NondeterministicPair,
    PdrmValidationError,
    StrictModeUndefined,
    TerminalStep,
    UnknownIdentifier,
)
from .guards import TRUE, Guard, all_symbols, parse_guard
from .pdrm import Configuration, PdRM, PdrmSpec, Transition
from .semantics import (
    DEFAULT_EPSILON_CAP,
    epsilon_closure,
    initial_configuration,
    run_word,
    step,
    step_with_transition,
    top_k_view,
)

__all__ = [
    "Configuration",
    "DEFAULT_EPSILON_CAP",
    "EmptyAlphabet",
    "EpsilonDivergence",
    "FinalStateOverlap",
    "Guard",
    "NondeterministicPair",
    "PdRM",
    "PdrmSpec",
    "PdrmValidationError",
    "StrictModeUndefined",
    "TRUE",
    "TerminalStep",
    "Transition",
    "UnknownIdentifier",
    "all_symbols",
    "epsilon_closure",
    "initial_configuration",
    "parse_guard",
    "run_word",
    "step",
    "step_with_transition",
    "top_k_view",
]
