"""DeliverWorld: visit location types in an order announced at the start of the episode."""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.environments.base import BadConfig, LabeledMDP, StartEntry
from src.environments.grid import ACTIONS, Cell, GridMap

TYPE_NAMES = {"1": "a", "2": "b", "3": "c", "4": "d"}

# Matches machines/deliverworld.pdrm; the first letter is the first delivery.
DEFAULT_SEQUENCES: Dict[str, str] = {
    "seq0": "abcd",
    "seq1": "badc",
    "seq2": "cdab",
    "seq3": "dcba",
    "seq4": "abcdcbad",
    "seq5": "badcabcd",
    "seq6": "cdabdcba",
    "seq7": "dcbadcba",
}


class DeliverWorld(LabeledMDP):
    """State is the agent cell. The reset label names the delivery sequence."""

    actions = ACTIONS

    def __init__(self, grid: GridMap, start: Cell, sequences: Dict[str, str], active: Sequence[str], horizon: int):
        self.grid = grid
        self.start = start
        self.sequences = dict(sequences)
        self.active = tuple(active)
        self.horizon = horizon
        self.reward_normalizer = 1.0
        self.name = "deliverworld"
        self.types = {cell: TYPE_NAMES.get(digit, digit) for cell, digit in grid.location_types.items()}
        self.atomic_props = frozenset(set(self.sequences) | set(self.types.values()))

    def with_sequences(self, active: Sequence[str], horizon: Optional[int] = None) -> "DeliverWorld":
        """Same grid with another set of candidate sequences (e.g. for evaluation)."""
        return DeliverWorld(self.grid, self.start, self.sequences, active, horizon or self.horizon)

    def states(self) -> List[Cell]:
        return self.grid.free_cells()

    def initial_distribution(self) -> List[StartEntry]:
        p = 1.0 / len(self.active)
        return [(self.start, frozenset({seq}), p) for seq in self.active]

    def transition_distribution(self, state: Cell, action: str) -> List[Tuple[Cell, float]]:
        return [(self.grid.move(state, action), 1.0)]

    def sample_transition(self, state, action, rng) -> Cell:
        return self.grid.move(state, action)

    def label(self, state: Cell, action: str, next_state: Cell) -> frozenset:
        if next_state != state and next_state in self.types:
            return frozenset({self.types[next_state]})
        return frozenset()


def build_deliverworld(cfg: Dict[str, Any], grid: GridMap) -> Tuple[DeliverWorld, DeliverWorld]:
    """Build the training environment and the evaluation environment.

    Args:
        cfg: ``train_deliveries`` / ``test_deliveries`` select the sequences
            of that length (defaults 4 and 4), ``sequences`` overrides the
            sequence table, ``horizon`` and ``test_horizon`` set episode lengths
        grid: Map with digit location types and an ``S`` start cell

    Returns:
        Tuple of (training env, evaluation env)

    Raises:
        BadConfig: If the grid lacks a start, a needed type or reachability
    """
    sequences = dict(cfg.get("sequences") or DEFAULT_SEQUENCES)
    start = grid.single("S")
    if start is None:
        raise BadConfig("DeliverWorld map has no start cell 'S'")
    horizon = int(cfg.get("horizon", 200))
    train_len = int(cfg.get("train_deliveries", 4))
    test_len = int(cfg.get("test_deliveries", train_len))
    train = [k for k, v in sorted(sequences.items()) if len(v) == train_len]
    test = [k for k, v in sorted(sequences.items()) if len(v) == test_len]
    if not train or not test:
        raise BadConfig(f"No delivery sequences of length {train_len} / {test_len}")
    env = DeliverWorld(grid, start, sequences, train, horizon)
    needed = {ch for k in set(train) | set(test) for ch in sequences[k]}
    present = set(env.types.values())
    if not needed <= present:
        raise BadConfig(f"DeliverWorld map lacks location types {sorted(needed - present)}")
    missing = grid.unreachable(start, list(env.types))
    if missing:
        raise BadConfig(f"DeliverWorld locations unreachable from start: {missing}")
    eval_env = env.with_sequences(test, int(cfg.get("test_horizon", horizon)))
    return env, eval_env
