"""State abstractions, action-value tables and learning hyperparameters."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Hashable, Iterator, Optional, Sequence, Tuple

import numpy as np

from src.product.product_mdp import ProductState

FULL = "full"
TOP_K = "top_k"
ABSTRACTION_KINDS = (FULL, TOP_K)


@dataclass(frozen=True)
class AbstractionSpec:
    """Which part of the machine memory a policy may look at.

    ``full`` keys on the whole stack (or counter values); ``top_k`` keys on
    the first ``k`` stack symbols only.
    """

    kind: str = FULL
    k: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ABSTRACTION_KINDS:
            raise ValueError(f"Unknown abstraction '{self.kind}'; expected one of {', '.join(ABSTRACTION_KINDS)}")
        if self.k < 0:
            raise ValueError(f"Abstraction k must be non-negative, got {self.k}")

    def key(self, ps: ProductState) -> Hashable:
        if self.kind == FULL:
            return (ps.env_state, ps.machine_state, ps.memory)
        return (ps.env_state, ps.machine_state, ps.stack[: self.k])

    def label(self) -> str:
        return FULL if self.kind == FULL else f"top_{self.k}"

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "AbstractionSpec":
        data = data or {}
        return cls(kind=data.get("kind", FULL), k=int(data.get("k", 0)))


class ActionValueTable:
    """Tabular Q estimates: one numpy row per key, created on first write."""

    def __init__(self, actions: Sequence[Hashable], initial_value: float = 0.0):
        self.actions = tuple(actions)
        self.initial_value = float(initial_value)
        self._index = {a: i for i, a in enumerate(self.actions)}
        self._rows: Dict[Hashable, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._rows

    def keys(self) -> Iterator[Hashable]:
        return iter(self._rows)

    def action_index(self, action: Hashable) -> int:
        return self._index[action]

    def values(self, key: Hashable) -> np.ndarray:
        """Row for ``key``; unseen keys read as the initial value without being stored."""
        row = self._rows.get(key)
        if row is None:
            return np.full(len(self.actions), self.initial_value)
        return row

    def get(self, key: Hashable, action: Hashable) -> float:
        return float(self.values(key)[self._index[action]])

    def set(self, key: Hashable, action: Hashable, value: float) -> None:
        row = self._rows.get(key)
        if row is None:
            row = np.full(len(self.actions), self.initial_value)
            self._rows[key] = row
        row[self._index[action]] = value

    def max_value(self, key: Hashable, allowed: Optional[Sequence[Hashable]] = None) -> float:
        row = self.values(key)
        if allowed is None:
            return float(row.max())
        return float(max(row[self._index[a]] for a in allowed))


@dataclass
class Hyperparams:
    alpha: float = 0.1
    gamma: float = 0.99
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.8
    episodes: int = 500
    eval_every: int = 10
    eval_episodes: int = 10
    seed: int = 0
    q_init: float = 0.0
    option_budget: Optional[int] = None
    fallback_action: Optional[Any] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        for name in ("epsilon_start", "epsilon_end"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.episodes < 0 or self.eval_every < 1 or self.eval_episodes < 1:
            raise ValueError("episodes must be >= 0, eval_every and eval_episodes >= 1")

    def epsilon_at(self, episode: int) -> float:
        """Linear decay from ``epsilon_start`` to ``epsilon_end`` over the decay fraction of training."""
        span = self.epsilon_decay_fraction * self.episodes
        if span <= 0 or episode >= span:
            return self.epsilon_end
        return self.epsilon_start + (self.epsilon_end - self.epsilon_start) * (episode / span)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]], defaults: Optional[Dict[str, Any]] = None) -> "Hyperparams":
        """Build from config values layered over ``defaults``; unknown keys raise ValueError."""
        merged = {**(defaults or {}), **(data or {})}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(merged) - known)
        if unknown:
            raise ValueError(f"Unknown hyperparameters: {', '.join(unknown)}")
        return cls(**merged)


def table_key_count(tables: Dict[Any, ActionValueTable] | ActionValueTable) -> int:
    if isinstance(tables, ActionValueTable):
        return len(tables)
    return sum(len(t) for t in tables.values())


def spawn_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator]:
    """Independent training and evaluation random streams from one seed."""
    train_seq, eval_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(train_seq), np.random.default_rng(eval_seq)
