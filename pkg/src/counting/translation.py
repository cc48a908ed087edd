"""Translation of one-counter automata into pushdown reward machines.

The counter value is the number of unit symbols above the bottom marker.
A zero test of 0 pops the marker, a zero test of 1 pops a unit symbol.
Increments push in the same transition; a decrement by |m| walks through
|m| helper states whose silent transitions pop a unit symbol when one is on
top and keep the marker otherwise. The reward rides on the last silent step.
"""

from __future__ import annotations

import logging
from typing import List

from src.automata.pdrm import PdRM, PdrmSpec, Transition
from src.counting.cra import CRA, HelperStateClash, MultiCounterUnsupported
from src.validation.pdrm_validator import validate_pdrm

logger = logging.getLogger(__name__)

BOTTOM = "#"
UNIT = "A"


def translate_cra_to_pdrm(cra: CRA, unit_symbol: str = UNIT, bottom_symbol: str = BOTTOM) -> PdRM:
    """Build the pushdown machine that emits the same rewards as ``cra``.

    Args:
        cra: Validated one-counter automaton
        unit_symbol: Stack symbol that counts one unit
        bottom_symbol: Bottom marker (the initial stack symbol)

    Returns:
        Validated pushdown reward machine

    Raises:
        MultiCounterUnsupported: If ``cra`` has more than one counter
        HelperStateClash: If a helper name ``<source>__<index>_<i>`` is already a state
    """
    if cra.n_counters != 1:
        raise MultiCounterUnsupported(
            f"Automaton '{cra.name}' has {cra.n_counters} counters; only one-counter automata translate"
        )
    states: List[str] = sorted(cra.states)
    transitions: List[Transition] = []
    for index, t in enumerate(cra.transitions):
        popped = unit_symbol if t.zero_test[0] == 1 else bottom_symbol
        delta = t.deltas[0]
        if delta >= 0:
            push = (unit_symbol,) * delta + (popped,)
            transitions.append(Transition(t.source, t.input_guard, popped, push, t.reward, t.target))
            continue
        helpers = [f"{t.source}__{index}_{i}" for i in range(1, -delta + 1)]
        for helper in helpers:
            if helper in cra.states or helper in cra.final_states:
                raise HelperStateClash(helper)
        states.extend(helpers)
        transitions.append(Transition(t.source, t.input_guard, popped, (popped,), 0.0, helpers[0]))
        for i, helper in enumerate(helpers):
            last = i == len(helpers) - 1
            target = t.target if last else helpers[i + 1]
            reward = t.reward if last else 0.0
            transitions.append(Transition(helper, None, unit_symbol, (), reward, target))
            transitions.append(Transition(helper, None, bottom_symbol, (bottom_symbol,), reward, target))
    spec = PdrmSpec(
        name=f"{cra.name}_translated",
        atomic_props=sorted(cra.atomic_props),
        states=states,
        initial_state=cra.initial_state,
        final_states=sorted(cra.final_states),
        stack_alphabet=[bottom_symbol, unit_symbol],
        initial_stack_symbol=bottom_symbol,
        mode=cra.mode,
        transitions=transitions,
    )
    pdrm = validate_pdrm(spec)
    logger.info(
        f"Translated '{cra.name}': {len(pdrm.states)} states "
        f"({len(states) - len(cra.states)} helpers), {len(pdrm.transitions)} transitions"
    )
    return pdrm


def helper_state_count(cra: CRA) -> int:
    """Number of helper states the translation adds: sum of |m| over decrements."""
    return sum(-t.deltas[0] for t in cra.transitions if t.deltas[0] < 0)
