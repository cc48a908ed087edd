"""Pushdown reward machine data types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from src.automata.guards import Guard

WILDCARD = "*"
LENIENT = "lenient"
STRICT = "strict"
MODES = (LENIENT, STRICT)


@dataclass(frozen=True)
class Transition:
    """One guarded transition.

    ``input_guard`` is None for a silent (epsilon) transition, ``pop`` is None
    when nothing is popped and ``"*"`` for a wildcard that validation expands.
    ``push`` lists the pushed symbols with the new top first.
    """

    source: str
    input_guard: Optional[Guard]
    pop: Optional[str]
    push: Tuple[str, ...]
    reward: float
    target: str

    @property
    def is_epsilon(self) -> bool:
        return self.input_guard is None

    def __str__(self) -> str:
        guard = "eps" if self.input_guard is None else str(self.input_guard)
        pop = "eps" if self.pop is None else self.pop
        push = " ".join(self.push) if self.push else "eps"
        return f"{self.source} | {guard} | {pop} | {push} | {self.reward!r} | {self.target}"


@dataclass
class PdrmSpec:
    """Machine as read from a ``.pdrm`` file, before validation."""

    name: str
    atomic_props: list[str] = field(default_factory=list)
    states: list[str] = field(default_factory=list)
    initial_state: Optional[str] = None
    final_states: list[str] = field(default_factory=list)
    stack_alphabet: list[str] = field(default_factory=list)
    initial_stack_symbol: Optional[str] = None
    mode: str = LENIENT
    transitions: list[Transition] = field(default_factory=list)


@dataclass(frozen=True)
class PdRM:
    """Validated deterministic pushdown reward machine. Build with ``validate_pdrm``."""

    name: str
    states: frozenset
    initial_state: str
    final_states: frozenset
    atomic_props: frozenset
    stack_alphabet: frozenset
    initial_stack_symbol: str
    transitions: Tuple[Transition, ...]
    mode: str = LENIENT
    _input_index: Dict[Tuple[str, Optional[str]], Tuple[Transition, ...]] = field(
        default=None, compare=False, repr=False, hash=False
    )
    _silent_index: Dict[Tuple[str, Optional[str]], Tuple[Transition, ...]] = field(
        default=None, compare=False, repr=False, hash=False
    )

    def __post_init__(self) -> None:
        inputs: dict = {}
        silent: dict = {}
        for t in self.transitions:
            bucket = silent if t.is_epsilon else inputs
            bucket.setdefault((t.source, t.pop), []).append(t)
        object.__setattr__(self, "_input_index", {k: tuple(v) for k, v in inputs.items()})
        object.__setattr__(self, "_silent_index", {k: tuple(v) for k, v in silent.items()})

    def input_candidates(self, state: str, top: Optional[str]) -> Tuple[Transition, ...]:
        """Input transitions whose source and pop fit (state, top)."""
        found = self._input_index.get((state, None), ())
        if top is not None:
            found = self._input_index.get((state, top), ()) + found
        return found

    def silent_candidates(self, state: str, top: Optional[str]) -> Tuple[Transition, ...]:
        found = self._silent_index.get((state, None), ())
        if top is not None:
            found = self._silent_index.get((state, top), ()) + found
        return found

    def is_final(self, state: str) -> bool:
        return state in self.final_states

    @property
    def all_states(self) -> frozenset:
        return self.states | self.final_states


@dataclass(frozen=True)
class Configuration:
    """Runtime pair of state and stack (index 0 is the top)."""

    state: str
    stack: Tuple[str, ...]
    terminal: bool = False

    @property
    def top(self) -> Optional[str]:
        return self.stack[0] if self.stack else None
