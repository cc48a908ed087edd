"""Exceptions raised while validating and running pushdown reward machines."""

from __future__ import annotations

from typing import Any, Optional


class PdrmValidationError(ValueError):
    """Base class for problems found in a machine description."""


class UnknownIdentifier(PdrmValidationError):
    """A transition or header names a state, symbol or proposition that was never declared."""

    def __init__(self, kind: str, name: str, where: str = ""):
        self.kind = kind
        self.name = name
        self.where = where
        suffix = f" ({where})" if where else ""
        super().__init__(f"Unknown {kind} '{name}'{suffix}")


class NondeterministicPair(PdrmValidationError):
    """Two transitions can fire on the same (state, input, top-of-stack) triple."""

    def __init__(self, first: Any, second: Any, witness: tuple):
        self.first = first
        self.second = second
        self.witness = witness
        state, sigma, top = witness
        shown = "eps" if sigma is None else "{" + ", ".join(sorted(sigma)) + "}"
        super().__init__(
            f"Nondeterministic transitions at ({state}, {shown}, {top}): {first} / {second}"
        )


class FinalStateOverlap(PdrmValidationError):
    """A state is declared both as a working state and as a final state."""

    def __init__(self, names: set[str]):
        self.names = set(names)
        super().__init__(f"States declared both working and final: {', '.join(sorted(names))}")


class EmptyAlphabet(PdrmValidationError):
    """The stack alphabet is empty."""


class GuardSyntaxError(PdrmValidationError):
    """An input guard could not be parsed."""

    def __init__(self, text: str, position: int, message: str):
        self.text = text
        self.position = position
        super().__init__(f"Bad guard '{text}' at position {position}: {message}")


class PdrmRuntimeError(RuntimeError):
    """Base class for errors raised while stepping a machine."""


class EpsilonDivergence(PdrmRuntimeError):
    """The epsilon-closure took more silent steps than the configured cap."""

    def __init__(self, state: str, cap: int):
        self.state = state
        self.cap = cap
        super().__init__(f"Epsilon-closure exceeded {cap} steps (last state '{state}')")


class StrictModeUndefined(PdrmRuntimeError):
    """Strict machine has no transition for the observed input."""

    def __init__(self, state: str, sigma: frozenset, top: Optional[str]):
        self.state = state
        self.sigma = sigma
        self.top = top
        super().__init__(f"No transition from '{state}' on {sorted(sigma)} with top '{top}'")


class TerminalStep(PdrmRuntimeError):
    """A step was requested from a terminal configuration."""
