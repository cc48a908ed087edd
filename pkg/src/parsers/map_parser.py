"""ASCII grid maps.

One character per cell: ``#`` wall, ``.`` floor, ``S`` start, ``T`` treasure,
``X`` exit, ``H`` safe location, ``A``/``B``/``C`` LetterEnv cells and digits
for delivery location types.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Tuple

from src.environments.grid import GridMap
from src.parsers.errors import ParseError

NAMED = set("STXHABC")
FLOOR = "."
WALL = "#"


def parse_map_text(text: str, source: Optional[Path | str] = None) -> GridMap:
    """Parse a map; blank lines are ignored.

    Raises:
        ParseError: On ragged rows or unknown characters
    """
    rows: List[Tuple[int, str]] = [
        (lineno, line.rstrip("\r\n")) for lineno, line in enumerate(text.splitlines(), 1) if line.strip()
    ]
    if not rows:
        raise ParseError("Map is empty", 1, 1, source)
    width = len(rows[0][1])
    walls = set()
    named: Dict[str, List[Tuple[int, int]]] = {}
    types: Dict[Tuple[int, int], str] = {}
    for r, (lineno, line) in enumerate(rows):
        if len(line) != width:
            raise ParseError(f"Row has {len(line)} cells, expected {width}", lineno, len(line) + 1, source)
        for c, ch in enumerate(line):
            if ch == WALL:
                walls.add((r, c))
            elif ch in NAMED:
                named.setdefault(ch, []).append((r, c))
            elif ch.isdigit():
                types[(r, c)] = ch
            elif ch != FLOOR:
                raise ParseError(f"Unknown map character '{ch}'", lineno, c + 1, source)
    return GridMap(
        width=width,
        height=len(rows),
        walls=frozenset(walls),
        named={k: tuple(v) for k, v in named.items()},
        location_types=types,
    )


def load_grid_map(path: Path) -> GridMap:
    return parse_map_text(Path(path).read_text(encoding="utf-8"), source=path)
