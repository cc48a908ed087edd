from __future__ import annotations

from typing import Dict, List

import numpy as np

from src.automata.errors import FinalStateOverlap, UnknownIdentifier
from src.automata.guards import Guard, all_symbols
from src.automata.pdrm import MODES
from src.counting.cra import CRA, CraSpec, CraValidationError, NondeterministicCra


def validate_cra(spec: CraSpec) -> CRA:
    """Validate a parsed counter automaton.

    Raises:
        ValueError: The first problem reported by ``find_cra_errors``
    """
    errors = find_cra_errors(spec)
    if errors:
        raise errors[0]
    return CRA(
        name=spec.name,
        states=frozenset(spec.states),
        initial_state=spec.initial_state,
        final_states=frozenset(spec.final_states),
        atomic_props=frozenset(spec.atomic_props),
        n_counters=spec.n_counters,
        transitions=tuple(spec.transitions),
        mode=spec.mode,
    )


def find_cra_errors(spec: CraSpec) -> List[ValueError]:
    """Collect every validation problem of a parsed counter automaton."""
    errors: List[ValueError] = []
    if spec.n_counters < 1:
        errors.append(CraValidationError(f"Automaton '{spec.name}' needs at least one counter"))
    overlap = set(spec.states) & set(spec.final_states)
    if overlap:
        errors.append(FinalStateOverlap(overlap))
    if spec.mode not in MODES:
        errors.append(UnknownIdentifier("mode", str(spec.mode)))
    if spec.initial_state not in spec.states:
        errors.append(UnknownIdentifier("state", str(spec.initial_state), "initial"))
    props = set(spec.atomic_props)
    for t in spec.transitions:
        where = str(t)
        if t.source not in spec.states:
            errors.append(UnknownIdentifier("state", t.source, where))
        if t.target not in spec.states and t.target not in spec.final_states:
            errors.append(UnknownIdentifier("state", t.target, where))
        for atom in sorted(t.input_guard.atoms() - props):
            errors.append(UnknownIdentifier("proposition", atom, where))
        if len(t.zero_test) != spec.n_counters or any(z not in (0, 1) for z in t.zero_test):
            errors.append(CraValidationError(f"Zero test must be {spec.n_counters} digits of 0/1: {where}"))
        if len(t.deltas) != spec.n_counters:
            errors.append(CraValidationError(f"Expected {spec.n_counters} counter deltas: {where}"))
    if errors:
        return errors
    errors.extend(_determinism_errors(spec))
    return errors


def _determinism_errors(spec: CraSpec) -> List[ValueError]:
    symbols = all_symbols(spec.atomic_props)
    tables: Dict[Guard, np.ndarray] = {}

    def table(guard: Guard) -> np.ndarray:
        if guard not in tables:
            tables[guard] = np.fromiter(
                (guard.matches(s) for s in symbols), dtype=bool, count=len(symbols)
            )
        return tables[guard]

    groups: Dict[tuple, list] = {}
    for t in spec.transitions:
        groups.setdefault((t.source, t.zero_test), []).append(t)
    errors: List[ValueError] = []
    for (state, zero_test), group in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        for i, first in enumerate(group):
            for second in group[i + 1:]:
                both = np.flatnonzero(table(first.input_guard) & table(second.input_guard))
                if both.size:
                    witness = (state, tuple(sorted(symbols[both[0]])), zero_test)
                    errors.append(NondeterministicCra(first, second, witness))
    return errors
