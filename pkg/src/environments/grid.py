"""Grid geometry shared by the grid environments."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

Cell = Tuple[int, int]

MOVES: Dict[str, Cell] = {"u": (-1, 0), "d": (1, 0), "l": (0, -1), "r": (0, 1)}
ACTIONS = ("u", "d", "l", "r")


@dataclass(frozen=True, eq=False)
class GridMap:
    """Rows top to bottom, cells addressed as (row, column)."""

    width: int
    height: int
    walls: frozenset
    named: Dict[str, Tuple[Cell, ...]] = field(default_factory=dict)
    location_types: Dict[Cell, str] = field(default_factory=dict)

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.walls

    def move(self, cell: Cell, action: str) -> Cell:
        """Deterministic move; walls and borders leave the agent in place."""
        dr, dc = MOVES[action]
        target = (cell[0] + dr, cell[1] + dc)
        return target if self.is_free(target) else cell

    def cells(self, symbol: str) -> Tuple[Cell, ...]:
        return self.named.get(symbol, ())

    def single(self, symbol: str) -> Optional[Cell]:
        found = self.cells(symbol)
        return found[0] if found else None

    def free_cells(self) -> list[Cell]:
        return [
            (r, c) for r in range(self.height) for c in range(self.width) if (r, c) not in self.walls
        ]

    def distances_from(self, start: Cell) -> Dict[Cell, int]:
        """Breadth-first move distances from ``start`` to every reachable cell."""
        dist = {start: 0}
        queue = deque([start])
        while queue:
            cell = queue.popleft()
            for action in ACTIONS:
                nxt = self.move(cell, action)
                if nxt not in dist:
                    dist[nxt] = dist[cell] + 1
                    queue.append(nxt)
        return dist

    def unreachable(self, start: Cell, targets: Iterable[Cell]) -> list[Cell]:
        reach = self.distances_from(start)
        return [t for t in targets if t not in reach]
