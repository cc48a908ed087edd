"""LetterEnv: count A events, wait for B, then match the count with C events."""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

from src.environments.base import BadConfig, LabeledMDP, StartEntry
from src.environments.grid import ACTIONS, Cell, GridMap

A_ACTIVE, B_PENDING, B_DONE = 0, 1, 2

DEFAULTS: Dict[str, Any] = {
    "size": 5,
    "a_cell": (0, 4),
    "c_cell": (4, 0),
    "exit_cell": (4, 4),
    "start": (0, 0),
    "horizon": 100,
    "flip_probability": 0.5,
}


class LetterEnv(LabeledMDP):
    """State is (row, col, flag). The flag says whether the A cell still shows A,
    shows B until its next visit, or shows nothing any more."""

    atomic_props = frozenset({"P_A", "P_B", "P_C", "tau"})
    actions = ACTIONS

    def __init__(self, grid: GridMap, a_cell: Cell, c_cell: Cell, exit_cell: Cell, start: Cell,
                 horizon: int, flip_probability: float):
        self.name = "letterenv"
        self.grid = grid
        self.a_cell = a_cell
        self.c_cell = c_cell
        self.exit_cell = exit_cell
        self.start = start
        self.horizon = horizon
        self.flip_probability = flip_probability
        self.reward_normalizer = 1.0

    def states(self) -> List[Tuple[int, int, int]]:
        return [(r, c, f) for (r, c) in self.grid.free_cells() for f in (A_ACTIVE, B_PENDING, B_DONE)]

    def initial_distribution(self) -> List[StartEntry]:
        return [((*self.start, A_ACTIVE), None, 1.0)]

    def transition_distribution(self, state, action) -> List[Tuple[Tuple[int, int, int], float]]:
        r, c, flag = state
        nr, nc = self.grid.move((r, c), action)
        if (nr, nc) != self.a_cell:
            return [((nr, nc, flag), 1.0)]
        if flag == A_ACTIVE:
            q = self.flip_probability
            outcomes = [((nr, nc, A_ACTIVE), 1.0 - q), ((nr, nc, B_PENDING), q)]
            return [o for o in outcomes if o[1] > 0.0]
        return [((nr, nc, B_DONE), 1.0)]

    def label(self, state, action, next_state) -> frozenset:
        cell = next_state[:2]
        if cell == self.a_cell:
            if state[2] == A_ACTIVE:
                return frozenset({"P_A"})
            if state[2] == B_PENDING:
                return frozenset({"P_B"})
            return frozenset()
        if cell == self.c_cell:
            return frozenset({"P_C"})
        if cell == self.exit_cell:
            return frozenset({"tau"})
        return frozenset()


def build_letterenv(cfg: Optional[Dict[str, Any]] = None, grid: Optional[GridMap] = None) -> LetterEnv:
    """Build LetterEnv from config values and an optional map.

    Args:
        cfg: Keys ``size``, ``a_cell``, ``c_cell``, ``exit_cell``, ``start``,
            ``horizon`` and ``flip_probability``; missing keys use the defaults
        grid: Map whose ``A``/``C``/``X``/``S`` cells override the config cells

    Returns:
        LetterEnv instance

    Raises:
        BadConfig: If a cell is out of bounds, on a wall or unreachable
    """
    params = {**DEFAULTS, **(cfg or {})}
    if grid is None:
        size = int(params["size"])
        grid = GridMap(width=size, height=size, walls=frozenset())
    cells = {
        "a_cell": grid.single("A") or tuple(params["a_cell"]),
        "c_cell": grid.single("C") or tuple(params["c_cell"]),
        "exit_cell": grid.single("X") or tuple(params["exit_cell"]),
        "start": grid.single("S") or tuple(params["start"]),
    }
    for key, cell in cells.items():
        if not grid.is_free(cell):
            raise BadConfig(f"LetterEnv {key} {cell} is outside the grid or on a wall")
    if len({cells["a_cell"], cells["c_cell"], cells["exit_cell"]}) != 3:
        raise BadConfig("LetterEnv A, C and exit cells must differ")
    missing = grid.unreachable(cells["start"], [cells["a_cell"], cells["c_cell"], cells["exit_cell"]])
    if missing:
        raise BadConfig(f"LetterEnv cells unreachable from start: {missing}")
    q = float(params["flip_probability"])
    if not 0.0 <= q <= 1.0:
        raise BadConfig(f"flip_probability must be in [0, 1], got {q}")
    return LetterEnv(grid, cells["a_cell"], cells["c_cell"], cells["exit_cell"], cells["start"],
                     int(params["horizon"]), q)
