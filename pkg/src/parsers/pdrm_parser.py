"""Reader and writer for the line-based ``.pdrm`` machine format.

Example::

    pdrm maze
    props: u d l r t x
    states: u0 u1
    initial: u0
    final: u2 u3
    stack: Z u d l r
    bottom: Z
    mode: lenient
    T u0 | u & !t | eps | u | 0 | u0
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Optional, Tuple

from src.automata.errors import GuardSyntaxError
from src.automata.guards import Guard, parse_guard
from src.automata.pdrm import WILDCARD, PdRM, PdrmSpec, Transition
from src.parsers.errors import ParseError
from src.validation.pdrm_validator import validate_pdrm

EPS = "eps"

_LIST_KEYS = {
    "props": "atomic_props",
    "states": "states",
    "final": "final_states",
    "stack": "stack_alphabet",
}
_SINGLE_KEYS = {
    "initial": "initial_state",
    "bottom": "initial_stack_symbol",
    "mode": "mode",
}


def parse_pdrm_text(text: str, source: Optional[Path | str] = None) -> PdrmSpec:
    """Parse ``.pdrm`` text into an unvalidated PdrmSpec.

    Args:
        text: File content
        source: Name used in error messages

    Returns:
        Parsed machine description

    Raises:
        ParseError: If a line is malformed
    """
    spec: Optional[PdrmSpec] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if spec is None:
            spec = PdrmSpec(name=parse_name_header(line, lineno, source, "pdrm"))
            continue
        if line.startswith("T ") or line == "T":
            spec.transitions.append(parse_transition_line(raw, lineno, source, spec.stack_alphabet))
            continue
        key, values = split_key_line(raw, lineno, source)
        if key in _LIST_KEYS:
            setattr(spec, _LIST_KEYS[key], values)
        elif key in _SINGLE_KEYS:
            if len(values) != 1:
                raise ParseError(f"'{key}' takes exactly one value", lineno, 1, source)
            setattr(spec, _SINGLE_KEYS[key], values[0])
        else:
            raise ParseError(f"Unknown header '{key}'", lineno, 1, source)
    if spec is None:
        raise ParseError("Missing 'pdrm <name>' header", 1, 1, source)
    return spec


def parse_pdrm(path: Path) -> PdrmSpec:
    return parse_pdrm_text(Path(path).read_text(encoding="utf-8"), source=path)


def load_pdrm(path: Path) -> PdRM:
    """Parse and validate a ``.pdrm`` file."""
    return validate_pdrm(parse_pdrm(path))


def serialize_pdrm(pdrm: PdRM) -> str:
    """Render a validated machine in ``.pdrm`` format (parse of the result gives back the machine)."""
    others = sorted(pdrm.states - {pdrm.initial_state})
    gamma = [pdrm.initial_stack_symbol] + sorted(pdrm.stack_alphabet - {pdrm.initial_stack_symbol})
    lines = [
        f"pdrm {pdrm.name}",
        "props: " + " ".join(sorted(pdrm.atomic_props)),
        "states: " + " ".join([pdrm.initial_state] + others),
        f"initial: {pdrm.initial_state}",
        "final: " + " ".join(sorted(pdrm.final_states)),
        "stack: " + " ".join(gamma),
        f"bottom: {pdrm.initial_stack_symbol}",
        f"mode: {pdrm.mode}",
    ]
    lines.extend(f"T {t}" for t in pdrm.transitions)
    return "\n".join(line.rstrip() for line in lines) + "\n"


def write_pdrm(pdrm: PdRM, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_pdrm(pdrm), encoding="utf-8")
    return path


def parse_transition_line(
    raw: str, lineno: int, source: Optional[Path | str], stack_alphabet: List[str]
) -> Transition:
    """Parse ``T src | guard | pop | push | reward | dst``.

    The guard may itself contain ``|``; the other fields never do, so the
    guard is everything between the first and the last four separators.
    """
    src, guard_text, pop_text, push_text, reward_text, dst = split_transition_fields(raw, lineno, source)
    guard = parse_guard_field(raw, guard_text, lineno, source)
    pop = _parse_pop(pop_text)
    push = parse_push(push_text, stack_alphabet)
    reward = parse_reward(raw, reward_text, lineno, source)
    return Transition(src, guard, pop, push, reward, dst)


def split_transition_fields(raw: str, lineno: int, source) -> Tuple[str, ...]:
    body = raw.strip()[1:]
    parts = body.split("|")
    if len(parts) < 6:
        raise ParseError("Transition needs 6 '|'-separated fields", lineno, 1, source)
    middle = "|".join(parts[1:-4])
    fields = [parts[0], middle, *parts[-4:]]
    fields = [f.strip() for f in fields]
    for name, value in zip(("source", "guard", "pop", "push", "reward", "target"), fields):
        if not value:
            raise ParseError(f"Empty {name} field", lineno, _column(raw, "|"), source)
    return tuple(fields)


def parse_guard_field(raw: str, text: str, lineno: int, source) -> Optional[Guard]:
    if text == EPS:
        return None
    try:
        return parse_guard(text)
    except GuardSyntaxError as exc:
        raise ParseError(str(exc), lineno, _column(raw, text) + exc.position, source) from exc


def parse_push(text: str, stack_alphabet: List[str]) -> Tuple[str, ...]:
    """Split a push field into symbols, new top first.

    Tokens are whitespace separated; a token that is not a declared symbol is
    read one character per symbol, so ``AA`` means ``A A``.
    """
    if text == EPS:
        return ()
    declared = set(stack_alphabet)
    symbols: List[str] = []
    for token in text.split():
        if token in declared or len(token) == 1:
            symbols.append(token)
        elif all(ch in declared for ch in token):
            symbols.extend(token)
        else:
            symbols.append(token)
    return tuple(symbols)


def parse_reward(raw: str, text: str, lineno: int, source) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"Reward '{text}' is not a number", lineno, _column(raw, text), source) from exc


def _parse_pop(text: str) -> Optional[str]:
    if text == EPS:
        return None
    if text == WILDCARD:
        return WILDCARD
    return text


def parse_name_header(line: str, lineno: int, source, keyword: str) -> str:
    parts = line.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise ParseError(f"Expected '{keyword} <name>' header", lineno, 1, source)
    return parts[1]


def split_key_line(raw: str, lineno: int, source) -> Tuple[str, List[str]]:
    if ":" not in raw:
        raise ParseError("Expected 'key: values'", lineno, 1, source)
    key, _, rest = raw.partition(":")
    return key.strip(), rest.split()


def _column(raw: str, needle: str) -> int:
    idx = raw.find(needle)
    return idx + 1 if idx >= 0 else 1

