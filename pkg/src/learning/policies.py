"""Action selection and the policies used for rollouts and evaluation."""

from __future__ import annotations

from typing import Any, Hashable, Sequence

import numpy as np

from src.learning.tables import AbstractionSpec, ActionValueTable
from src.product.product_mdp import ProductState

TIE_TOLERANCE = 1e-12


def greedy_choice(values: np.ndarray, rng: np.random.Generator) -> int:
    """Index of a maximal entry, ties broken uniformly at random."""
    best = np.flatnonzero(values >= values.max() - TIE_TOLERANCE)
    if len(best) == 1:
        return int(best[0])
    return int(rng.choice(best))


def select_action_epsilon_greedy(
    table: ActionValueTable,
    key: Hashable,
    actions: Sequence[Hashable],
    epsilon: float,
    rng: np.random.Generator,
) -> Hashable:
    """Uniform action with probability ``epsilon``, else a greedy one.

    Args:
        table: Action-value estimates
        key: Abstracted state
        actions: Candidate actions (nonempty, all known to ``table``)
        epsilon: Exploration probability
        rng: Random stream

    Returns:
        The chosen action
    """
    if not actions:
        raise ValueError("No actions to choose from")
    if epsilon > 0.0 and rng.random() < epsilon:
        return actions[int(rng.integers(len(actions)))]
    row = table.values(key)
    values = np.array([row[table.action_index(a)] for a in actions])
    return actions[greedy_choice(values, rng)]


class Policy:
    """Episode protocol used by rollouts: ``begin_episode``, ``act``, ``observe``."""

    def begin_episode(self, ps: ProductState) -> None:
        pass

    def act(self, ps: ProductState, rng: np.random.Generator) -> Hashable:
        raise NotImplementedError

    def observe(self, ps: ProductState, action: Hashable, outcome: Any) -> None:
        pass


class GreedyTablePolicy(Policy):
    def __init__(self, table: ActionValueTable, abstraction: AbstractionSpec):
        self.table = table
        self.abstraction = abstraction

    def act(self, ps, rng):
        return select_action_epsilon_greedy(self.table, self.abstraction.key(ps), self.table.actions, 0.0, rng)


class RandomPolicy(Policy):
    def __init__(self, actions: Sequence[Hashable]):
        self.actions = tuple(actions)

    def act(self, ps, rng):
        return self.actions[int(rng.integers(len(self.actions)))]


class ScriptedPolicy(Policy):
    """Plays a fixed action sequence, restarting it every episode."""

    def __init__(self, actions: Sequence[Hashable]):
        if not actions:
            raise ValueError("A scripted policy needs at least one action")
        self.actions = tuple(actions)
        self._t = 0

    def begin_episode(self, ps):
        self._t = 0

    def act(self, ps, rng):
        action = self.actions[min(self._t, len(self.actions) - 1)]
        self._t += 1
        return action
