"""Value iteration on explicit product MDPs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.product.enumeration import ExplicitProductMDP

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-8
TIE_TOLERANCE = 1e-6
ROW_SUM_TOLERANCE = 1e-9


class NonFiniteValue(ValueError):
    """Malformed probabilities or rewards, or a diverging backup."""


@dataclass
class ValueSolution:
    values: np.ndarray
    q_values: np.ndarray
    optimal_actions: List[Tuple]
    iterations: int
    residual: float
    gamma: float
    tie_tolerance: float = TIE_TOLERANCE
    residuals: List[float] = field(default_factory=list)

    def value_of(self, mdp: ExplicitProductMDP, state) -> float:
        return float(self.values[mdp.index[state]])

    def initial_value(self, mdp: ExplicitProductMDP) -> float:
        """Expected value over the initial distribution, including pending rewards."""
        return float(sum(p * (r + self.values[i]) for i, p, r in mdp.initial))


def _check_model(matrix, rewards: np.ndarray) -> None:
    if not (np.all(np.isfinite(matrix.data)) and np.all(np.isfinite(rewards))):
        raise NonFiniteValue("Transition probabilities or rewards are not finite")
    if matrix.nnz and matrix.data.min() < 0.0:
        raise NonFiniteValue("Negative transition probability")
    sums = np.asarray(matrix.sum(axis=1)).ravel()
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)
    if bad.size:
        raise NonFiniteValue(f"{bad.size} (state, action) rows do not sum to 1, first row {int(bad[0])}")


def value_iteration(
    mdp: ExplicitProductMDP,
    tol: float = DEFAULT_TOLERANCE,
    gamma: Optional[float] = None,
    tie_tolerance: float = TIE_TOLERANCE,
    max_iterations: int = 100_000,
) -> ValueSolution:
    """Synchronous Bellman backups until the sup-norm residual drops below ``tol``.

    Args:
        mdp: Enumerated product; absorbing states loop on themselves with reward 0
        tol: Residual threshold
        gamma: Discount in (0, 1), defaults to the MDP's
        tie_tolerance: Actions within this distance of the best backup are optimal
        max_iterations: Hard iteration limit

    Returns:
        ValueSolution with values, Q-values, optimal-action sets and residual history

    Raises:
        ValueError: If gamma is outside (0, 1)
        NonFiniteValue: On malformed input or a non-finite result
    """
    gamma = mdp.gamma if gamma is None else gamma
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"Value iteration needs gamma in (0, 1), got {gamma}")
    matrix, rewards = mdp.to_sparse()
    _check_model(matrix, rewards)
    n_states, n_actions = mdp.n_states, mdp.n_actions
    values = np.zeros(n_states)
    residuals: List[float] = []
    residual = np.inf
    iterations = 0
    while iterations < max_iterations:
        q = (rewards + gamma * (matrix @ values)).reshape(n_states, n_actions)
        updated = q.max(axis=1) if n_actions else np.zeros(n_states)
        residual = float(np.max(np.abs(updated - values))) if n_states else 0.0
        values = updated
        iterations += 1
        residuals.append(residual)
        if residual < tol:
            break
    else:
        logger.warning(f"Value iteration stopped after {max_iterations} iterations, residual {residual:.3e}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteValue("Value iteration produced non-finite values")

    q = (rewards + gamma * (matrix @ values)).reshape(n_states, n_actions)
    best = q.max(axis=1, keepdims=True)
    optimal = [
        tuple(mdp.actions[a] for a in np.flatnonzero(row >= b - tie_tolerance)) for row, b in zip(q, best[:, 0])
    ]
    logger.info(f"Value iteration converged in {iterations} iterations (residual {residual:.2e}, {n_states} states)")
    return ValueSolution(values, q, optimal, iterations, residual, gamma, tie_tolerance, residuals)
