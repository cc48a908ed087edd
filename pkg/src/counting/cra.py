"""Counting reward automata: counters with zero tests and constant deltas."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.automata.errors import StrictModeUndefined, TerminalStep
from src.automata.guards import Guard
from src.automata.pdrm import LENIENT, STRICT


class CraValidationError(ValueError):
    """Base class for problems found in a counter automaton description."""


class NondeterministicCra(CraValidationError):
    """Two transitions apply to the same (state, input, zero test)."""

    def __init__(self, first: "CRATransition", second: "CRATransition", witness: tuple):
        self.first = first
        self.second = second
        self.witness = witness
        super().__init__(f"Nondeterministic transitions at {witness}: {first} / {second}")


class MultiCounterUnsupported(CraValidationError):
    """Only one-counter automata translate into pushdown machines."""


class HelperStateClash(CraValidationError):
    """A translation helper state would reuse the name of an automaton state."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Helper state '{name}' clashes with an automaton state; rename that state")


class NegativeCounter(RuntimeError):
    """A transition would drive a counter below zero."""

    def __init__(self, transition: "CRATransition", counters: Tuple[int, ...]):
        self.transition = transition
        self.counters = counters
        super().__init__(f"Counters {list(counters)} would go negative on {transition}")


@dataclass(frozen=True)
class CRATransition:
    source: str
    input_guard: Guard
    zero_test: Tuple[int, ...]
    deltas: Tuple[int, ...]
    reward: float
    target: str

    def __str__(self) -> str:
        zero = "".join(str(z) for z in self.zero_test)
        deltas = ",".join(f"{d:+d}" if d else "0" for d in self.deltas)
        return f"{self.source} | {self.input_guard} | {zero} | {deltas} | {self.reward!r} | {self.target}"


@dataclass
class CraSpec:
    """Counter automaton as read from a ``.cra`` file, before validation."""

    name: str
    atomic_props: List[str] = field(default_factory=list)
    states: List[str] = field(default_factory=list)
    initial_state: Optional[str] = None
    final_states: List[str] = field(default_factory=list)
    n_counters: int = 1
    mode: str = LENIENT
    transitions: List[CRATransition] = field(default_factory=list)


@dataclass(frozen=True)
class CounterConfiguration:
    """Automaton state plus counter values.

    ``length`` is only used by machines that track an encoded path length.
    """

    state: str
    counters: Tuple[int, ...]
    terminal: bool = False
    length: int = 0


@dataclass(frozen=True)
class CounterStep:
    config: CounterConfiguration
    reward: float
    fired: Optional[object]
    unit_ops: int


class CounterMachine(ABC):
    """Anything that steps counter configurations on input symbols."""

    name: str
    atomic_props: frozenset

    @abstractmethod
    def initial_configuration(self) -> CounterConfiguration:
        ...

    @abstractmethod
    def step(self, config: CounterConfiguration, sigma: frozenset) -> CounterStep:
        ...


@dataclass(frozen=True)
class CRA(CounterMachine):
    """Validated counter automaton. Build with ``validate_cra``."""

    name: str
    states: frozenset
    initial_state: str
    final_states: frozenset
    atomic_props: frozenset
    n_counters: int
    transitions: Tuple[CRATransition, ...]
    mode: str = LENIENT
    _index: Dict[Tuple[str, Tuple[int, ...]], Tuple[CRATransition, ...]] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self) -> None:
        index: dict = {}
        for t in self.transitions:
            index.setdefault((t.source, t.zero_test), []).append(t)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def candidates(self, state: str, zero_test: Tuple[int, ...]) -> Tuple[CRATransition, ...]:
        return self._index.get((state, zero_test), ())

    def initial_configuration(self) -> CounterConfiguration:
        return CounterConfiguration(
            self.initial_state, (0,) * self.n_counters, self.initial_state in self.final_states
        )

    def step(self, config: CounterConfiguration, sigma: frozenset) -> CounterStep:
        if config.terminal:
            raise TerminalStep(f"Counter configuration in final state '{config.state}' cannot step")
        transition = self._find(config, sigma)
        if transition is None:
            if self.mode == STRICT:
                raise StrictModeUndefined(config.state, sigma, None)
            return CounterStep(config, 0.0, None, 0)
        counters = tuple(c + d for c, d in zip(config.counters, transition.deltas))
        if any(c < 0 for c in counters):
            raise NegativeCounter(transition, config.counters)
        moved = CounterConfiguration(
            transition.target, counters, transition.target in self.final_states
        )
        unit_ops = 1 + sum(abs(d) for d in transition.deltas)
        return CounterStep(moved, transition.reward, transition, unit_ops)

    def _find(self, config: CounterConfiguration, sigma: frozenset) -> Optional[CRATransition]:
        for t in self.candidates(config.state, zero_test_of(config.counters)):
            if t.input_guard.matches(sigma):
                return t
        return None


def zero_test_of(counters: Iterable[int]) -> Tuple[int, ...]:
    """Indicator vector: 1 where the counter is nonzero."""
    return tuple(1 if c != 0 else 0 for c in counters)


def cra_step(
    cra: CRA, state: str, counters: Sequence[int], sigma: Iterable[str]
) -> Tuple[str, Tuple[int, ...], float]:
    """Apply one input symbol.

    Args:
        cra: Validated automaton
        state: Current state
        counters: Current counter values (all non-negative)
        sigma: Observed propositions

    Returns:
        Tuple of (next state, next counters, reward)

    Raises:
        NegativeCounter: If a delta would take a counter below zero
    """
    counters = tuple(counters)
    config = CounterConfiguration(state, counters, state in cra.final_states)
    result = cra.step(config, frozenset(sigma))
    return result.config.state, result.config.counters, result.reward


def run_counter_word(
    machine: CounterMachine, word: Sequence[Iterable[str]]
) -> Tuple[List[float], CounterConfiguration]:
    """Reward trace of a counter machine on a word, stopping at a final state."""
    config = machine.initial_configuration()
    trace: List[float] = []
    for sigma in word:
        if config.terminal:
            break
        result = machine.step(config, frozenset(sigma))
        trace.append(result.reward)
        config = result.config
    return trace, config
