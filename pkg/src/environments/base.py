"""Labelled MDP interface and an explicit table-backed implementation."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

State = Hashable
Action = Hashable
Label = frozenset
StartEntry = Tuple[State, Optional[Label], float]

NORMALIZATION_TOL = 1e-9


class BadConfig(ValueError):
    """Environment parameters or map are unusable."""


class LabeledMDP(ABC):
    """Tabular environment whose transitions are labelled with proposition sets.

    An environment may emit a reset label at the start of an episode (for
    example the order of deliveries); the product applies it to the machine
    before the first action.
    """

    name: str = "env"
    actions: Tuple[Action, ...] = ()
    atomic_props: frozenset = frozenset()
    horizon: int = 100
    reward_normalizer: float = 1.0
    evaluation_starts: Optional[List[Tuple[State, Optional[Label]]]] = None

    @abstractmethod
    def states(self) -> List[State]:
        """Every environment state, in a fixed order."""

    @abstractmethod
    def initial_distribution(self) -> List[StartEntry]:
        """(state, reset label or None, probability) triples."""

    @abstractmethod
    def transition_distribution(self, state: State, action: Action) -> List[Tuple[State, float]]:
        """Explicit next-state distribution."""

    @abstractmethod
    def label(self, state: State, action: Action, next_state: State) -> Label:
        """Propositions observed on the transition; must be a pure function."""

    def reward(self, state: State, action: Action, next_state: State) -> float:
        """Environment reward channel; zero unless an environment overrides it."""
        return 0.0

    def sample_initial(self, rng: np.random.Generator) -> Tuple[State, Optional[Label]]:
        entries = self.initial_distribution()
        if len(entries) == 1:
            return entries[0][0], entries[0][1]
        probs = np.array([p for _, _, p in entries], dtype=float)
        idx = int(rng.choice(len(entries), p=probs / probs.sum()))
        return entries[idx][0], entries[idx][1]

    def sample_transition(self, state: State, action: Action, rng: np.random.Generator) -> State:
        outcomes = self.transition_distribution(state, action)
        if len(outcomes) == 1:
            return outcomes[0][0]
        probs = np.array([p for _, p in outcomes], dtype=float)
        idx = int(rng.choice(len(outcomes), p=probs / probs.sum()))
        return outcomes[idx][0]

    def check_distributions(self) -> None:
        """Verify that every explicit distribution sums to one.

        Raises:
            BadConfig: On the first distribution that does not normalize
        """
        total = sum(p for _, _, p in self.initial_distribution())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise BadConfig(f"{self.name}: initial distribution sums to {total}")
        for s in self.states():
            for a in self.actions:
                total = sum(p for _, p in self.transition_distribution(s, a))
                if abs(total - 1.0) > NORMALIZATION_TOL:
                    raise BadConfig(f"{self.name}: p(.|{s!r}, {a!r}) sums to {total}")


class TabularMDP(LabeledMDP):
    """Environment given entirely by explicit tables.

    Args:
        states: Environment states
        actions: Available actions
        transitions: (state, action) -> list of (next state, probability)
        labels: Function or table mapping (state, action, next state) to propositions
        initial: Start entries; a bare state means probability one without reset label
        rewards: Optional (state, action, next state) -> environment reward
        horizon: Episode length
        reward_normalizer: R_max for normalized returns
        atomic_props: Declared propositions
        name: Environment name
    """

    def __init__(
        self,
        states: Sequence[State],
        actions: Sequence[Action],
        transitions: Dict[Tuple[State, Action], List[Tuple[State, float]]],
        labels: Callable[[State, Action, State], Iterable[str]] | Dict[Tuple[State, Action, State], Iterable[str]],
        initial: State | List[StartEntry],
        rewards: Optional[Dict[Tuple[State, Action, State], float]] = None,
        horizon: int = 10,
        reward_normalizer: float = 1.0,
        atomic_props: Iterable[str] = (),
        name: str = "tabular",
    ):
        self.name = name
        self._states = list(states)
        self.actions = tuple(actions)
        self._transitions = dict(transitions)
        self._labels = labels
        self._initial = initial if isinstance(initial, list) else [(initial, None, 1.0)]
        self._rewards = dict(rewards or {})
        self.horizon = horizon
        self.reward_normalizer = reward_normalizer
        self.atomic_props = frozenset(atomic_props)
        missing = [(s, a) for s in self._states for a in self.actions if (s, a) not in self._transitions]
        if missing:
            raise BadConfig(f"{name}: no transitions for {missing[:3]}")
        self.check_distributions()

    def states(self) -> List[State]:
        return list(self._states)

    def initial_distribution(self) -> List[StartEntry]:
        return list(self._initial)

    def transition_distribution(self, state: State, action: Action) -> List[Tuple[State, float]]:
        return self._transitions[(state, action)]

    def label(self, state: State, action: Action, next_state: State) -> Label:
        if callable(self._labels):
            return frozenset(self._labels(state, action, next_state))
        return frozenset(self._labels.get((state, action, next_state), ()))

    def reward(self, state: State, action: Action, next_state: State) -> float:
        return self._rewards.get((state, action, next_state), 0.0)


def describe(env: LabeledMDP) -> Dict[str, Any]:
    return {
        "name": env.name,
        "states": len(env.states()),
        "actions": list(env.actions),
        "horizon": env.horizon,
        "reward_normalizer": env.reward_normalizer,
    }
