"""Propositional input guards over a set of atomic propositions.

A guard matches an input symbol (a set of propositions) when the symbol, read
as a truth assignment, satisfies the formula. Grammar::

    expr  := conj ('|' conj)*
    conj  := unary ('&' unary)*
    unary := '!' unary | '(' expr ')' | 'true' | 'false' | identifier
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Optional

from src.automata.errors import GuardSyntaxError, UnknownIdentifier

_TOKEN = re.compile(r"\s*(?:(?P<op>[!&|()])|(?P<name>[A-Za-z_][A-Za-z0-9_]*))")

_PRECEDENCE = {"or": 1, "and": 2, "not": 3, "atom": 4, "true": 4, "false": 4}


@dataclass(frozen=True)
class Guard:
    """Parsed guard. Equality is structural on the normalized syntax tree."""

    tree: tuple
    _fn: Callable[[frozenset], bool] = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_fn", _compile(self.tree))

    def matches(self, sigma: frozenset) -> bool:
        return self._fn(sigma)

    def atoms(self) -> set[str]:
        return set(_atoms(self.tree))

    def __str__(self) -> str:
        return _render(self.tree)

    def __reduce__(self):
        # the compiled matcher is a closure; rebuild it on load
        return (Guard, (self.tree,))


def parse_guard(text: str, props: Optional[Iterable[str]] = None) -> Guard:
    """Parse guard text into a Guard.

    Args:
        text: Formula text, e.g. ``"!P_A & !P_B"``
        props: Declared propositions; when given, unknown atoms are rejected

    Returns:
        Parsed guard

    Raises:
        GuardSyntaxError: If the text does not follow the grammar
        UnknownIdentifier: If an atom is not a declared proposition
    """
    tokens = list(_tokenize(text))
    parser = _Parser(text, tokens)
    tree = parser.parse()
    guard = Guard(tree)
    if props is not None:
        declared = set(props)
        for atom in sorted(guard.atoms()):
            if atom not in declared:
                raise UnknownIdentifier("proposition", atom, f"guard '{text}'")
    return guard


def all_symbols(props: Iterable[str]) -> list[frozenset]:
    """Enumerate every input symbol of 2^AP, ordered by size then name."""
    ordered = sorted(props)
    symbols: list[frozenset] = []
    for size in range(len(ordered) + 1):
        for combo in combinations(ordered, size):
            symbols.append(frozenset(combo))
    return symbols


def _tokenize(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m:
            raise GuardSyntaxError(text, pos, "unexpected character")
        if m.group("op"):
            yield ("op", m.group("op"), m.start("op"))
        else:
            yield ("name", m.group("name"), m.start("name"))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, tokens: list[tuple[str, str, int]]):
        self.text = text
        self.tokens = tokens
        self.i = 0

    def parse(self) -> tuple:
        if not self.tokens:
            raise GuardSyntaxError(self.text, 0, "empty guard")
        tree = self._expr()
        if self.i != len(self.tokens):
            raise GuardSyntaxError(self.text, self.tokens[self.i][2], "trailing input")
        return tree

    def _peek(self) -> Optional[tuple[str, str, int]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _expr(self) -> tuple:
        parts = [self._conj()]
        while (tok := self._peek()) and tok[1] == "|":
            self.i += 1
            parts.append(self._conj())
        return _flatten("or", parts)

    def _conj(self) -> tuple:
        parts = [self._unary()]
        while (tok := self._peek()) and tok[1] == "&":
            self.i += 1
            parts.append(self._unary())
        return _flatten("and", parts)

    def _unary(self) -> tuple:
        tok = self._peek()
        if tok is None:
            raise GuardSyntaxError(self.text, len(self.text), "unexpected end")
        kind, value, pos = tok
        self.i += 1
        if value == "!":
            return ("not", self._unary())
        if value == "(":
            inner = self._expr()
            closing = self._peek()
            if closing is None or closing[1] != ")":
                raise GuardSyntaxError(self.text, pos, "unbalanced parenthesis")
            self.i += 1
            return inner
        if kind == "name":
            if value == "true":
                return ("true",)
            if value == "false":
                return ("false",)
            return ("atom", value)
        raise GuardSyntaxError(self.text, pos, f"unexpected '{value}'")


def _flatten(op: str, parts: list[tuple]) -> tuple:
    if len(parts) == 1:
        return parts[0]
    flat: list[tuple] = []
    for part in parts:
        if part[0] == op:
            flat.extend(part[1:])
        else:
            flat.append(part)
    return (op, *flat)


def _atoms(tree: tuple) -> Iterator[str]:
    if tree[0] == "atom":
        yield tree[1]
    elif tree[0] in ("not", "and", "or"):
        for child in tree[1:]:
            yield from _atoms(child)


def _compile(tree: tuple) -> Callable[[frozenset], bool]:
    op = tree[0]
    if op == "true":
        return lambda sigma: True
    if op == "false":
        return lambda sigma: False
    if op == "atom":
        name = tree[1]
        return lambda sigma: name in sigma
    if op == "not":
        inner = _compile(tree[1])
        return lambda sigma: not inner(sigma)
    children = [_compile(child) for child in tree[1:]]
    if op == "and":
        return lambda sigma: all(fn(sigma) for fn in children)
    return lambda sigma: any(fn(sigma) for fn in children)


def _render(tree: tuple, parent: int = 0) -> str:
    op = tree[0]
    if op in ("true", "false"):
        return op
    if op == "atom":
        return tree[1]
    if op == "not":
        return "!" + _render(tree[1], _PRECEDENCE["not"])
    sep = " & " if op == "and" else " | "
    text = sep.join(_render(child, _PRECEDENCE[op]) for child in tree[1:])
    return f"({text})" if _PRECEDENCE[op] <= parent else text


TRUE = Guard(("true",))
