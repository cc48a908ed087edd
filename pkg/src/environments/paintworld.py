"""PaintWorld: remove n stains by requesting soap; asking for i units costs i/(i+1)."""

from __future__ import annotations

from typing import List, Tuple

from src.environments.base import LabeledMDP, StartEntry

MAX_STAINS = 5
PAINTWORLD_HORIZON = 5


def request_penalty(units: int) -> float:
    return -units / (units + 1)


class PaintWorld(LabeledMDP):
    """Single environment state; the stain count lives on the machine's stack."""

    name = "paintworld"
    actions = tuple(range(1, MAX_STAINS + 1))
    atomic_props = frozenset(
        [f"paint_{n}" for n in range(1, MAX_STAINS + 1)] + [f"soap_{i}" for i in range(1, MAX_STAINS + 1)]
    )

    def __init__(self, horizon: int = PAINTWORLD_HORIZON):
        self.horizon = horizon
        # worst single request
        self.reward_normalizer = -request_penalty(MAX_STAINS)
        self.evaluation_starts = [(0, frozenset({f"paint_{n}"})) for n in range(1, MAX_STAINS + 1)]

    def states(self) -> List[int]:
        return [0]

    def initial_distribution(self) -> List[StartEntry]:
        p = 1.0 / MAX_STAINS
        return [(0, frozenset({f"paint_{n}"}), p) for n in range(1, MAX_STAINS + 1)]

    def transition_distribution(self, state: int, action: int) -> List[Tuple[int, float]]:
        return [(0, 1.0)]

    def sample_transition(self, state, action, rng) -> int:
        return 0

    def label(self, state: int, action: int, next_state: int) -> frozenset:
        return frozenset({f"soap_{action}"})

    def reward(self, state: int, action: int, next_state: int) -> float:
        return request_penalty(int(action))


def build_paintworld(horizon: int = PAINTWORLD_HORIZON) -> PaintWorld:
    return PaintWorld(horizon)
