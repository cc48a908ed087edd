"""Uniform stepping interface over pushdown and counter reward machines."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Hashable, Optional, Tuple, Union

from src.automata.pdrm import PdRM
from src.automata.semantics import DEFAULT_EPSILON_CAP, initial_configuration, step_with_transition
from src.counting.cra import CounterMachine

PDRM_KIND = "pdrm"
COUNTER_KIND = "counter"


@dataclass(frozen=True)
class MachineStep:
    config: Hashable
    reward: float
    fired: Optional[Any]
    unit_ops: int = 1


class MachineRunner(ABC):
    """Steps a machine configuration on a label.

    Configurations are immutable and hashable so they can sit inside product
    states and table keys.
    """

    kind: str
    name: str
    atomic_props: frozenset

    @abstractmethod
    def start(self) -> Tuple[Hashable, float]:
        """Initial configuration and the reward of any initial silent steps."""

    @abstractmethod
    def advance(self, config: Hashable, sigma: frozenset) -> MachineStep:
        ...

    @staticmethod
    def is_terminal(config: Hashable) -> bool:
        return bool(config.terminal)

    def exceeds_budget(self, result: MachineStep) -> bool:
        return False


class PdrmRunner(MachineRunner):
    kind = PDRM_KIND

    def __init__(self, pdrm: PdRM, epsilon_cap: int = DEFAULT_EPSILON_CAP):
        self.pdrm = pdrm
        self.name = pdrm.name
        self.atomic_props = pdrm.atomic_props
        self.epsilon_cap = epsilon_cap

    def start(self):
        return initial_configuration(self.pdrm, self.epsilon_cap)

    def advance(self, config, sigma):
        moved, reward, fired = step_with_transition(self.pdrm, config, sigma, self.epsilon_cap)
        return MachineStep(moved, reward, fired, 1)


class CraRunner(MachineRunner):
    """Counter automaton runner with an optional per-step unit-operation budget.

    A step whose counter update costs more than ``op_budget`` unit operations
    truncates the episode, standing in for a wall-clock time-out.
    ``wall_clock_limit`` (seconds per episode) is enforced by the episode loops.
    """

    kind = COUNTER_KIND

    def __init__(self, machine: CounterMachine, op_budget: Optional[int] = None,
                 wall_clock_limit: Optional[float] = None):
        self.machine = machine
        self.name = machine.name
        self.atomic_props = machine.atomic_props
        self.op_budget = op_budget
        self.wall_clock_limit = wall_clock_limit
        self.logger = logging.getLogger(__name__)

    def start(self):
        return self.machine.initial_configuration(), 0.0

    def advance(self, config, sigma):
        result = self.machine.step(config, sigma)
        return MachineStep(result.config, result.reward, result.fired, result.unit_ops)

    def exceeds_budget(self, result: MachineStep) -> bool:
        if self.op_budget is not None and result.unit_ops > self.op_budget:
            self.logger.debug(f"Counter update of {result.unit_ops} unit operations exceeds budget {self.op_budget}")
            return True
        return False


Machine = Union[PdRM, CounterMachine, MachineRunner]


def as_runner(machine: Machine) -> MachineRunner:
    """Wrap a bare machine in its runner; runners pass through."""
    if isinstance(machine, MachineRunner):
        return machine
    if isinstance(machine, PdRM):
        return PdrmRunner(machine)
    if isinstance(machine, CounterMachine):
        return CraRunner(machine)
    raise TypeError(f"Not a reward machine: {type(machine).__name__}")
