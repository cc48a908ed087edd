"""Counter growth of path-encoding automata.

A counter automaton that must remember a path writes it as a base-4 number:
step i adds ``4**i * value(direction)``. Done with constant additions this
costs about ``4**i / 4`` unit operations per step, which is what makes such
baselines time out on larger mazes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

from src.automata.pdrm import PdRM
from src.automata.semantics import initial_configuration, step
from src.counting.cra import CounterConfiguration, CounterMachine, CounterStep

DIRECTIONS = ("u", "d", "l", "r")
DIGIT = {"u": 0, "d": 1, "l": 2, "r": 3}
OPPOSITE = {"u": "d", "d": "u", "l": "r", "r": "l"}

SEARCH = "search"
RETRACE = "retrace"
SUCCESS = "success"
FAIL = "fail"


def unit_operations(amount: int) -> int:
    """One transition plus one constant +4 per full unit of four added or removed."""
    return 1 + amount // 4


@dataclass(frozen=True)
class PathEncodingCRA(CounterMachine):
    """Counter baseline for the treasure maze: encode the way in, decode it on the way back.

    Rewards follow the maze task: 1 for reaching the exit on the last correct
    retrace move, -1 for a wrong retrace move.
    """

    name: str = "path_encoding"
    atomic_props: frozenset = frozenset(DIRECTIONS + ("t", "x"))
    final_states: frozenset = frozenset({SUCCESS, FAIL})

    def initial_configuration(self) -> CounterConfiguration:
        return CounterConfiguration(SEARCH, (0,), False, 0)

    def step(self, config: CounterConfiguration, sigma: frozenset) -> CounterStep:
        move = _direction(sigma)
        if config.terminal or move is None:
            return CounterStep(config, 0.0, None, 0)
        encoding = config.counters[0]
        if config.state == SEARCH:
            added = DIGIT[move] * 4 ** config.length
            state = RETRACE if "t" in sigma else SEARCH
            moved = CounterConfiguration(state, (encoding + added,), False, config.length + 1)
            return CounterStep(moved, 0.0, ("push", move), unit_operations(added))
        if config.length == 0:
            return CounterStep(config, 0.0, None, 0)
        place = 4 ** (config.length - 1)
        top = DIRECTIONS[(encoding // place) % 4]
        if move != OPPOSITE[top]:
            failed = CounterConfiguration(FAIL, config.counters, True, config.length)
            return CounterStep(failed, -1.0, ("wrong", move), 1)
        removed = DIGIT[top] * place
        done = "x" in sigma
        moved = CounterConfiguration(
            SUCCESS if done else RETRACE, (encoding - removed,), done, config.length - 1
        )
        return CounterStep(moved, 1.0 if done else 0.0, ("pop", top), unit_operations(removed))


def _direction(sigma: frozenset) -> Optional[str]:
    for d in DIRECTIONS:
        if d in sigma:
            return d
    return None


@dataclass
class GrowthReport:
    """Per input symbol: running maximum counter value and unit operations spent."""

    max_counter: List[int] = field(default_factory=list)
    unit_ops: List[int] = field(default_factory=list)


def measure_counter_growth(machine: CounterMachine, word: Sequence[Iterable[str]]) -> GrowthReport:
    """Running maximum counter value after each input symbol.

    Args:
        machine: Counter automaton (general CRA or path encoder)
        word: Input symbols; the run stops at a final state

    Returns:
        GrowthReport with one entry per consumed symbol
    """
    config = machine.initial_configuration()
    report = GrowthReport()
    running = max(config.counters, default=0)
    for sigma in word:
        if config.terminal:
            break
        result = machine.step(config, frozenset(sigma))
        config = result.config
        running = max(running, max(config.counters, default=0))
        report.max_counter.append(running)
        report.unit_ops.append(result.unit_ops)
    return report


def path_word(path: Iterable[str], treasure_at_end: bool = False) -> List[frozenset]:
    """Labels of a path of moves, optionally marking the last move as reaching the treasure."""
    moves = list(path)
    word = [frozenset({m}) for m in moves]
    if treasure_at_end and word:
        word[-1] = word[-1] | {"t"}
    return word


@dataclass(frozen=True)
class GrowthRow:
    steps: int
    max_counter: int
    unit_ops: int
    stack_length: int


def compare_growth(pdrm: PdRM, path: Sequence[str], machine: Optional[CounterMachine] = None) -> List[GrowthRow]:
    """Counter value and cost of the path encoder next to the pushdown stack length.

    Args:
        pdrm: Maze pushdown machine reading the same labels
        path: Sequence of moves
        machine: Counter automaton, defaults to ``PathEncodingCRA``

    Returns:
        One row per step of the path
    """
    machine = machine or PathEncodingCRA()
    word = path_word(path)
    growth = measure_counter_growth(machine, word)
    config, _ = initial_configuration(pdrm)
    rows: List[GrowthRow] = []
    for i, sigma in enumerate(word[: len(growth.max_counter)]):
        if not config.terminal:
            config, _ = step(pdrm, config, sigma)
        rows.append(GrowthRow(i + 1, growth.max_counter[i], growth.unit_ops[i], len(config.stack)))
    return rows
