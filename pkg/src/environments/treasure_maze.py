"""Treasure mazes: walk to the treasure(s) and return along the same path.

Labels: the direction of the action, always; ``t`` when the move reaches an
uncollected treasure; ``x`` when it reaches the exit. Multi mode adds
``safe`` on reaching the safe cell, together with ``all`` once every treasure
has been collected. A wall bump only emits the direction.
"""

from __future__ import annotations

from typing import List, Tuple

from src.environments.base import BadConfig, LabeledMDP, StartEntry
from src.environments.grid import ACTIONS, GridMap

MazeState = Tuple[int, int, int]


class TreasureMaze(LabeledMDP):
    """State is (row, col, mask of collected treasures)."""

    actions = ACTIONS

    def __init__(self, grid: GridMap, multi: bool, horizon: int):
        self.grid = grid
        self.multi = multi
        self.treasures = tuple(sorted(grid.cells("T")))
        self.exit = grid.single("X")
        self.start = grid.single("S") or self.exit
        self.safe = grid.single("H") if multi else None
        self.full_mask = (1 << len(self.treasures)) - 1
        self.horizon = horizon
        self.reward_normalizer = 1.0
        self.name = "multi_treasure_maze" if multi else "treasure_maze"
        props = {"u", "d", "l", "r", "t", "x"}
        if multi:
            props |= {"safe", "all"}
        self.atomic_props = frozenset(props)

    def states(self) -> List[MazeState]:
        return [(r, c, m) for (r, c) in self.grid.free_cells() for m in range(self.full_mask + 1)]

    def initial_distribution(self) -> List[StartEntry]:
        return [((*self.start, 0), None, 1.0)]

    def transition_distribution(self, state: MazeState, action: str) -> List[Tuple[MazeState, float]]:
        return [(self._next(state, action), 1.0)]

    def sample_transition(self, state, action, rng) -> MazeState:
        return self._next(state, action)

    def _next(self, state: MazeState, action: str) -> MazeState:
        r, c, mask = state
        cell = self.grid.move((r, c), action)
        if cell != (r, c) and cell in self.treasures:
            mask |= 1 << self.treasures.index(cell)
        return (*cell, mask)

    def label(self, state: MazeState, action: str, next_state: MazeState) -> frozenset:
        props = {action}
        cell = next_state[:2]
        if cell == state[:2]:
            return frozenset(props)
        if cell in self.treasures and not state[2] & (1 << self.treasures.index(cell)):
            props.add("t")
        if cell == self.exit:
            props.add("x")
        if self.multi and cell == self.safe:
            props.add("safe")
            if next_state[2] == self.full_mask:
                props.add("all")
        return frozenset(props)


def build_treasure_maze(grid: GridMap, n_treasures: int, multi: bool, horizon: int = 100) -> TreasureMaze:
    """Build a treasure maze from a map.

    Args:
        grid: Map with an ``X`` exit, ``T`` treasures and, in multi mode, an ``H`` safe cell
        n_treasures: Expected number of treasure cells
        multi: Multiple-treasure variant
        horizon: Episode length

    Returns:
        TreasureMaze instance

    Raises:
        BadConfig: If the map does not match the request or a target is unreachable
    """
    if grid.single("X") is None:
        raise BadConfig("Maze map has no exit cell 'X'")
    treasures = grid.cells("T")
    if len(treasures) != n_treasures:
        raise BadConfig(f"Maze map has {len(treasures)} treasures, expected {n_treasures}")
    if n_treasures < 1:
        raise BadConfig("A treasure maze needs at least one treasure")
    if not multi and n_treasures != 1:
        raise BadConfig("The single-treasure maze takes exactly one treasure")
    if multi and grid.single("H") is None:
        raise BadConfig("Multiple-treasure maze map has no safe cell 'H'")
    maze = TreasureMaze(grid, multi, horizon)
    targets = list(treasures) + [maze.exit] + ([maze.safe] if multi else [])
    missing = grid.unreachable(maze.start, targets)
    if missing:
        raise BadConfig(f"Maze cells unreachable from start: {missing}")
    return maze
