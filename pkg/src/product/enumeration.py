"""Bounded breadth-first enumeration of a product into an explicit finite MDP."""

from __future__ import annotations

import csv
import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple

import numpy as np
from scipy import sparse

from src.automata.pdrm import PdRM
from src.automata.semantics import DEFAULT_EPSILON_CAP
from src.environments.base import LabeledMDP
from src.product.product_mdp import ProductState, reset_product
from src.product.runners import PdrmRunner

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 5_000_000
OVERFLOW = "<overflow>"

FINAL, OVERFLOWED, TRUNCATED = "final", "overflow", "truncated"

TRIPLET_COLUMNS = ("state", "action", "next", "probability", "reward")


class ExplosionGuard(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"Product enumeration exceeded {cap} states")
        self.cap = cap


class EpsilonCycle(ValueError):
    def __init__(self, state: str):
        super().__init__(f"Silent transitions form a cycle through state '{state}'")
        self.state = state


def machine_push_bound(pdrm: PdRM) -> Tuple[int, int]:
    """Return (m, e): the longest push and the longest chain of pushing silent steps.

    Raises:
        EpsilonCycle: If the silent transitions contain a cycle
    """
    m = max((len(t.push) for t in pdrm.transitions), default=0)
    edges: Dict[str, List[Tuple[str, int]]] = {}
    for t in pdrm.transitions:
        if t.is_epsilon:
            edges.setdefault(t.source, []).append((t.target, 1 if t.push else 0))

    longest: Dict[str, int] = {}
    visiting: set = set()

    def visit(state: str) -> int:
        if state in longest:
            return longest[state]
        if state in visiting:
            raise EpsilonCycle(state)
        visiting.add(state)
        best = 0
        for target, pushes in edges.get(state, ()):
            best = max(best, pushes + visit(target))
        visiting.discard(state)
        longest[state] = best
        return best

    e = max((visit(s) for s in sorted(edges)), default=0)
    return m, e


def default_stack_cap(pdrm: PdRM, horizon: int) -> int:
    m, e = machine_push_bound(pdrm)
    return horizon * m * (e + 1)


@dataclass
class ExplicitProductMDP:
    """Enumerated product with sparse per-(state, action) outcome lists.

    ``transitions[(i, a)]`` holds (next index, probability, reward) triples,
    one per environment outcome. Final, overflow and horizon-truncated states
    are absorbing with reward 0.
    """

    states: List[Hashable]
    actions: Tuple[Hashable, ...]
    transitions: Dict[Tuple[int, int], List[Tuple[int, float, float]]]
    status: Dict[int, str]
    depth: List[int]
    initial: List[Tuple[int, float, float]]
    horizon: int
    stack_cap: int
    index: Dict[Hashable, int] = field(default_factory=dict)
    gamma: float = 0.99

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def overflow_index(self) -> Optional[int]:
        return self.index.get(OVERFLOW)

    @property
    def overflowed(self) -> bool:
        return OVERFLOW in self.index

    def absorbing(self) -> np.ndarray:
        flags = np.zeros(self.n_states, dtype=bool)
        for i in self.status:
            flags[i] = True
        return flags

    def to_sparse(self) -> Tuple[sparse.csr_matrix, np.ndarray]:
        """Transition matrix of shape (S*A, S) and expected rewards of length S*A.

        Row ``i * A + a`` belongs to state ``i`` and action index ``a``.
        """
        n_actions = self.n_actions
        rows, cols, probs = [], [], []
        rewards = np.zeros(self.n_states * n_actions)
        for i in range(self.n_states):
            for a in range(n_actions):
                row = i * n_actions + a
                outcomes = self.transitions.get((i, a))
                if outcomes is None:
                    rows.append(row)
                    cols.append(i)
                    probs.append(1.0)
                    continue
                for j, p, r in outcomes:
                    rows.append(row)
                    cols.append(j)
                    probs.append(p)
                    rewards[row] += p * r
        matrix = sparse.coo_matrix(
            (np.asarray(probs, dtype=float), (np.asarray(rows), np.asarray(cols))),
            shape=(self.n_states * n_actions, self.n_states),
        ).tocsr()
        return matrix, rewards

    def stack_lengths(self) -> List[int]:
        return [len(s.stack) for s in self.states if isinstance(s, ProductState)]


def enumerate_bounded_product(
    env: LabeledMDP,
    pdrm: PdRM,
    horizon: int,
    stack_cap: Optional[int] = None,
    state_cap: int = DEFAULT_STATE_CAP,
    epsilon_cap: int = DEFAULT_EPSILON_CAP,
    gamma: float = 0.99,
) -> ExplicitProductMDP:
    """Enumerate every product state reachable within ``horizon`` steps.

    Args:
        env: Environment with explicit transition distributions
        pdrm: Validated pushdown reward machine
        horizon: Depth bound; states first reached at this depth are not expanded
        stack_cap: Stack growth bound, default ``horizon * m * (e + 1)``; a
            successor whose stack is longer than ``stack_cap + 1`` goes to the
            overflow state
        state_cap: Maximum number of enumerated states
        epsilon_cap: Silent-step cap of the machine semantics
        gamma: Discount stored with the MDP for value iteration

    Returns:
        ExplicitProductMDP; ``depth`` is the first depth at which each state
        was reached

    Raises:
        ExplosionGuard: If more than ``state_cap`` states are reached
    """
    runner = PdrmRunner(pdrm, epsilon_cap)
    cap = default_stack_cap(pdrm, horizon) if stack_cap is None else stack_cap
    actions = tuple(env.actions)
    states: List[Hashable] = []
    index: Dict[Hashable, int] = {}
    depth: List[int] = []
    status: Dict[int, str] = {}
    transitions: Dict[Tuple[int, int], List[Tuple[int, float, float]]] = {}
    queue: deque = deque()

    def intern(ps: ProductState, d: int) -> int:
        key = OVERFLOW if len(ps.stack) > cap + 1 else ps
        found = index.get(key)
        if found is not None:
            return found
        if len(states) >= state_cap:
            raise ExplosionGuard(state_cap)
        i = len(states)
        states.append(key)
        index[key] = i
        depth.append(d)
        if key is OVERFLOW:
            status[i] = OVERFLOWED
        elif ps.terminal:
            status[i] = FINAL
        elif d >= horizon:
            status[i] = TRUNCATED
        else:
            queue.append(i)
        return i

    initial = []
    for env_state, reset_label, p in env.initial_distribution():
        ps, pending = reset_product(env, runner, None, (env_state, reset_label))
        initial.append((intern(ps, 0), p, pending))

    while queue:
        i = queue.popleft()
        ps = states[i]
        for a, action in enumerate(actions):
            outcomes = []
            for next_env, p in env.transition_distribution(ps.env_state, action):
                if p <= 0.0:
                    continue
                sigma = env.label(ps.env_state, action, next_env)
                moved = runner.advance(ps.config, sigma)
                reward = moved.reward + env.reward(ps.env_state, action, next_env)
                j = intern(ProductState(next_env, moved.config), depth[i] + 1)
                outcomes.append((j, p, reward))
            transitions[(i, a)] = outcomes

    mdp = ExplicitProductMDP(states, actions, transitions, status, depth, initial, horizon, cap, index, gamma)
    logger.info(
        f"Enumerated {mdp.n_states} product states of {env.name} x {pdrm.name} "
        f"(horizon {horizon}, stack cap {cap}, overflow {'reached' if mdp.overflowed else 'unused'})"
    )
    return mdp


def export_triplets(mdp: ExplicitProductMDP, path: Path) -> Path:
    """Write the explicit transitions as tab-separated rows.

    Columns: state index, action, next state index, probability, reward.
    Absorbing states are left out; they loop on themselves with reward 0.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, delimiter="\t", lineterminator="\n")
        writer.writerow(TRIPLET_COLUMNS)
        for (i, a), outcomes in sorted(mdp.transitions.items()):
            for j, p, r in outcomes:
                writer.writerow([i, mdp.actions[a], j, repr(float(p)), repr(float(r))])
    return path
