"""Reader and writer for ``.cra`` counter automaton files.

Same layout as ``.pdrm``; transitions read
``T <src> | <guard> | <zerotest e.g. 10> | <deltas e.g. +1,0> | <reward> | <dst>``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Tuple

from src.counting.cra import CRA, CraSpec, CRATransition
from src.parsers.errors import ParseError
from src.parsers.pdrm_parser import (
    EPS,
    parse_guard_field,
    parse_name_header,
    parse_reward,
    split_key_line,
    split_transition_fields,
)
from src.validation.cra_validator import validate_cra


def parse_cra_text(text: str, source: Optional[Path | str] = None) -> CraSpec:
    """Parse ``.cra`` text into an unvalidated CraSpec.

    Raises:
        ParseError: If a line is malformed
    """
    spec: Optional[CraSpec] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if spec is None:
            spec = CraSpec(name=parse_name_header(line, lineno, source, "cra"))
            continue
        if line.startswith("T "):
            spec.transitions.append(_parse_transition(raw, lineno, source))
            continue
        key, values = split_key_line(raw, lineno, source)
        if key == "props":
            spec.atomic_props = values
        elif key == "states":
            spec.states = values
        elif key == "final":
            spec.final_states = values
        elif key in ("initial", "mode", "counters"):
            if len(values) != 1:
                raise ParseError(f"'{key}' takes exactly one value", lineno, 1, source)
            if key == "initial":
                spec.initial_state = values[0]
            elif key == "mode":
                spec.mode = values[0]
            else:
                spec.n_counters = _parse_int(values[0], raw, lineno, source)
        else:
            raise ParseError(f"Unknown header '{key}'", lineno, 1, source)
    if spec is None:
        raise ParseError("Missing 'cra <name>' header", 1, 1, source)
    return spec


def parse_cra(path: Path) -> CraSpec:
    return parse_cra_text(Path(path).read_text(encoding="utf-8"), source=path)


def load_cra(path: Path) -> CRA:
    """Parse and validate a ``.cra`` file."""
    return validate_cra(parse_cra(path))


def serialize_cra(cra: CRA) -> str:
    others = sorted(cra.states - {cra.initial_state})
    lines = [
        f"cra {cra.name}",
        "props: " + " ".join(sorted(cra.atomic_props)),
        "states: " + " ".join([cra.initial_state] + others),
        f"initial: {cra.initial_state}",
        "final: " + " ".join(sorted(cra.final_states)),
        f"counters: {cra.n_counters}",
        f"mode: {cra.mode}",
    ]
    lines.extend(f"T {t}" for t in cra.transitions)
    return "\n".join(line.rstrip() for line in lines) + "\n"


def _parse_transition(raw: str, lineno: int, source) -> CRATransition:
    src, guard_text, zero_text, delta_text, reward_text, dst = split_transition_fields(raw, lineno, source)
    if guard_text == EPS:
        raise ParseError("Counter automata have no silent transitions", lineno, 1, source)
    guard = parse_guard_field(raw, guard_text, lineno, source)
    if not zero_text.isdigit():
        raise ParseError(f"Bad zero test '{zero_text}'", lineno, raw.find(zero_text) + 1, source)
    zero_test = tuple(int(ch) for ch in zero_text)
    deltas = _parse_deltas(delta_text, raw, lineno, source)
    reward = parse_reward(raw, reward_text, lineno, source)
    return CRATransition(src, guard, zero_test, deltas, reward, dst)


def _parse_deltas(text: str, raw: str, lineno: int, source) -> Tuple[int, ...]:
    return tuple(_parse_int(part.strip(), raw, lineno, source) for part in text.split(","))


def _parse_int(text: str, raw: str, lineno: int, source) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ParseError(f"'{text}' is not an integer", lineno, raw.find(text) + 1, source) from exc
