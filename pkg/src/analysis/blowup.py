"""Closed-form counts of stack strings and measured key counts of enumerated products."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from src.automata.pdrm import PdRM
from src.environments.base import LabeledMDP
from src.product.enumeration import enumerate_bounded_product, machine_push_bound
from src.product.product_mdp import ProductState

logger = logging.getLogger(__name__)


class BlowupBoundViolation(RuntimeError):
    pass


def _geometric(gamma_size: int, length: int) -> int:
    """Number of strings of length 0..length over an alphabet of ``gamma_size`` symbols."""
    if gamma_size < 1 or length < 0:
        raise ValueError("gamma_size must be >= 1 and length >= 0")
    if gamma_size == 1:
        return length + 1
    return (gamma_size ** (length + 1) - 1) // (gamma_size - 1)


def count_stack_strings(gamma_size: int, k: int) -> int:
    """Stack views a top-k policy can distinguish."""
    return _geometric(gamma_size, k)


def count_full_bound(gamma_size: int, n: int, m: int, e: int) -> int:
    """Stack strings of length at most n*m*(e+1)."""
    if min(n, m, e) < 0:
        raise ValueError("n, m and e must be non-negative")
    return _geometric(gamma_size, n * m * (e + 1))


@dataclass(frozen=True)
class BlowupRow:
    abstraction: str
    empirical: int
    bound: int


@dataclass
class BlowupReport:
    horizon: int
    m: int
    e: int
    n_env_states: int
    n_machine_states: int
    gamma_size: int
    rows: List[BlowupRow]
    distinct_stacks: int

    def row(self, abstraction: str) -> Optional[BlowupRow]:
        return next((r for r in self.rows if r.abstraction == abstraction), None)


def measure_blowup(
    env: LabeledMDP,
    pdrm: PdRM,
    horizon: int,
    k_list: Sequence[int],
    stack_cap: Optional[int] = None,
) -> BlowupReport:
    """Count distinct full and top-k keys among reachable product states.

    Raises:
        BlowupBoundViolation: If a count exceeds its closed-form bound
    """
    mdp = enumerate_bounded_product(env, pdrm, horizon, stack_cap)
    states = [s for s in mdp.states if isinstance(s, ProductState)]
    m, e = machine_push_bound(pdrm)
    g = len(pdrm.stack_alphabet)
    scale = len(env.states()) * len(pdrm.all_states)
    rows = [
        BlowupRow(
            "full",
            len({(s.env_state, s.machine_state, s.stack) for s in states}),
            scale * count_full_bound(g, horizon, m, e),
        )
    ]
    for k in k_list:
        rows.append(
            BlowupRow(
                f"top_{k}",
                len({(s.env_state, s.machine_state, s.stack[:k]) for s in states}),
                scale * count_stack_strings(g, k),
            )
        )
    for row in rows:
        logger.info(f"{row.abstraction}: {row.empirical} keys (bound {row.bound})")
        if row.empirical > row.bound:
            raise BlowupBoundViolation(f"{row.abstraction}: {row.empirical} keys exceed the bound {row.bound}")
    return BlowupReport(horizon, m, e, len(env.states()), len(pdrm.all_states), g, rows,
                        len({s.stack for s in states}))


def reachable_stack_counts(
    env: LabeledMDP,
    pdrm: PdRM,
    horizons: Sequence[int],
    stack_cap: Optional[int] = None,
) -> List[int]:
    """Number of distinct stacks reachable within each horizon."""
    counts = []
    for horizon in horizons:
        mdp = enumerate_bounded_product(env, pdrm, horizon, stack_cap)
        counts.append(len({s.stack for s in mdp.states if isinstance(s, ProductState)}))
    return counts
