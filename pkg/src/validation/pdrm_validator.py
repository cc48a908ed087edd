"""Validation of parsed pushdown reward machines.

Wildcard pops are expanded to one transition per stack symbol and
determinism is checked exactly, by evaluating every guard on every input
symbol of 2^AP.
"""

from __future__ import annotations

import logging
from typing import Dict, List, Optional

import numpy as np

from src.automata.errors import (
    EmptyAlphabet,
    FinalStateOverlap,
    NondeterministicPair,
    PdrmValidationError,
    UnknownIdentifier,
)
from src.automata.guards import Guard, all_symbols
from src.automata.pdrm import MODES, WILDCARD, PdRM, PdrmSpec, Transition

logger = logging.getLogger(__name__)


def validate_pdrm(spec: PdrmSpec) -> PdRM:
    """Validate a parsed machine and return the immutable PdRM.

    Args:
        spec: Machine as produced by the ``.pdrm`` parser

    Returns:
        Validated machine with wildcards expanded

    Raises:
        PdrmValidationError: The first problem found (see ``find_pdrm_errors``)
    """
    errors = find_pdrm_errors(spec)
    if errors:
        raise errors[0]
    return _build(spec)


def find_pdrm_errors(spec: PdrmSpec) -> List[PdrmValidationError]:
    """Collect every validation problem of a parsed machine.

    Args:
        spec: Machine as produced by the ``.pdrm`` parser

    Returns:
        List of errors (empty if the machine is valid)
    """
    errors: List[PdrmValidationError] = []
    if not spec.stack_alphabet:
        errors.append(EmptyAlphabet(f"Machine '{spec.name}' declares no stack symbols"))
    overlap = set(spec.states) & set(spec.final_states)
    if overlap:
        errors.append(FinalStateOverlap(overlap))
    errors.extend(_identifier_errors(spec))
    if errors:
        return errors
    expanded = expand_wildcards(spec.transitions, spec.stack_alphabet)
    errors.extend(_determinism_errors(spec, expanded))
    return errors


def expand_wildcards(transitions: List[Transition], stack_alphabet: List[str]) -> List[Transition]:
    """Replace every wildcard pop with one concrete transition per stack symbol."""
    expanded: List[Transition] = []
    for t in transitions:
        if t.pop != WILDCARD:
            expanded.append(t)
            continue
        for symbol in sorted(stack_alphabet):
            expanded.append(
                Transition(t.source, t.input_guard, symbol, t.push, t.reward, t.target)
            )
    return expanded


def _identifier_errors(spec: PdrmSpec) -> List[PdrmValidationError]:
    errors: List[PdrmValidationError] = []
    states = set(spec.states)
    finals = set(spec.final_states)
    gamma = set(spec.stack_alphabet)
    props = set(spec.atomic_props)
    if spec.mode not in MODES:
        errors.append(UnknownIdentifier("mode", str(spec.mode)))
    if spec.initial_state not in states:
        errors.append(UnknownIdentifier("state", str(spec.initial_state), "initial"))
    if spec.initial_stack_symbol not in gamma:
        errors.append(UnknownIdentifier("stack symbol", str(spec.initial_stack_symbol), "bottom"))
    for t in spec.transitions:
        where = str(t)
        if t.source not in states:
            errors.append(UnknownIdentifier("state", t.source, where))
        if t.target not in states and t.target not in finals:
            errors.append(UnknownIdentifier("state", t.target, where))
        if t.pop is not None and t.pop != WILDCARD and t.pop not in gamma:
            errors.append(UnknownIdentifier("stack symbol", t.pop, where))
        for symbol in t.push:
            if symbol not in gamma:
                errors.append(UnknownIdentifier("stack symbol", symbol, where))
        if t.input_guard is not None:
            for atom in sorted(t.input_guard.atoms() - props):
                errors.append(UnknownIdentifier("proposition", atom, where))
    return errors


def _determinism_errors(spec: PdrmSpec, transitions: List[Transition]) -> List[PdrmValidationError]:
    symbols = all_symbols(spec.atomic_props)
    tables: Dict[Guard, np.ndarray] = {}

    def table(guard: Guard) -> np.ndarray:
        if guard not in tables:
            tables[guard] = np.fromiter(
                (guard.matches(s) for s in symbols), dtype=bool, count=len(symbols)
            )
        return tables[guard]

    by_source: Dict[str, List[Transition]] = {}
    for t in transitions:
        by_source.setdefault(t.source, []).append(t)

    errors: List[PdrmValidationError] = []
    reported: set = set()
    for state in sorted(by_source):
        outgoing = by_source[state]
        for top in sorted(spec.stack_alphabet):
            applicable = [t for t in outgoing if t.pop is None or t.pop == top]
            silent = [t for t in applicable if t.is_epsilon]
            inputs = [t for t in applicable if not t.is_epsilon]
            conflict = _first_conflict(state, top, silent, inputs, symbols, table)
            if conflict is None:
                continue
            key = (str(conflict.first), str(conflict.second))
            if key not in reported:
                reported.add(key)
                errors.append(conflict)
    if errors:
        logger.debug(f"Machine '{spec.name}' has {len(errors)} determinism conflicts")
    return errors


def _first_conflict(state, top, silent, inputs, symbols, table) -> Optional[NondeterministicPair]:
    if len(silent) > 1:
        return NondeterministicPair(silent[0], silent[1], (state, None, top))
    if silent:
        for t in inputs:
            hits = np.flatnonzero(table(t.input_guard))
            if hits.size:
                return NondeterministicPair(silent[0], t, (state, symbols[hits[0]], top))
        return None
    for i, first in enumerate(inputs):
        for second in inputs[i + 1:]:
            both = np.flatnonzero(table(first.input_guard) & table(second.input_guard))
            if both.size:
                return NondeterministicPair(first, second, (state, symbols[both[0]], top))
    return None


def _build(spec: PdrmSpec) -> PdRM:
    return PdRM(
        name=spec.name,
        states=frozenset(spec.states),
        initial_state=spec.initial_state,
        final_states=frozenset(spec.final_states),
        atomic_props=frozenset(spec.atomic_props),
        stack_alphabet=frozenset(spec.stack_alphabet),
        initial_stack_symbol=spec.initial_stack_symbol,
        transitions=tuple(expand_wildcards(spec.transitions, spec.stack_alphabet)),
        mode=spec.mode,
    )
