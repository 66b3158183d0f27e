"""Text grammar for polynomials, derivations, endomorphisms and gradings.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' INT)?
    atom   := INT | VAR | '(' expr ')'

Juxtaposition is rejected (``2x1`` and ``x1 x2`` are errors) and the right
operand of ``/`` must be a nonzero constant, so ``1/2*x2`` reads as
``(1/2)*x2``.  Whitespace is insignificant.  Error offsets are byte offsets
into the UTF-8 encoding of the input.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .errors import PolySyntaxError, VariableRangeError
from .poly import MultiPoly

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")
_DEFAULT_VAR = re.compile(r"x(\d+)\Z")


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, nvars: int, names: Sequence[str] | None, base: int):
        self.text = text
        self.nvars = nvars
        self.names = {n: i + 1 for i, n in enumerate(names)} if names else None
        self.base = base
        self.tokens = self._tokenize()
        self.pos = 0

    def error(self, message: str, index: int, cls=PolySyntaxError):
        raise cls(message, self.base + _byte_offset(self.text, index))

    def _tokenize(self) -> list[tuple[str, str, int]]:
        tokens = []
        i = 0
        text = self.text
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            if i >= len(text):
                break
            m = _TOKEN.match(text, i)
            if m is None or m.end() == i:
                self.error(f"unexpected character {text[i]!r}", i)
            kind = m.lastgroup
            tokens.append((kind, m.group(kind), m.start(kind)))
            i = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, val, at = self.take()
        if val != value or kind != "op":
            self.error(f"expected {value!r}", at)

    def parse(self) -> MultiPoly:
        if self.peek()[0] == "end":
            self.error("empty expression", self.peek()[2])
        p = self.expr()
        kind, val, at = self.peek()
        if kind != "end":
            if kind in ("int", "name") or val == "(":
                self.error("implicit multiplication is not allowed", at)
            self.error(f"unexpected {val!r}", at)
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            at = self.peek()[2]
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if not q.is_constant() or not q:
                    self.error("divisor must be a nonzero constant", at)
                p = p / q.constant_term()
        return p

    def unary(self) -> MultiPoly:
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            p = self.unary()
            return -p if val == "-" else p
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, at = self.take()
            if kind != "int":
                self.error("exponent must be a non-negative integer literal", at)
            return base ** int(val)
        return base

    def atom(self) -> MultiPoly:
        kind, val, at = self.take()
        if kind == "int":
            return MultiPoly.constant(self.nvars, int(val))
        if kind == "name":
            return MultiPoly.variable(self.nvars, self.resolve(val, at))
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect(")")
            return p
        if kind == "end":
            self.error("unexpected end of input", at)
        self.error(f"unexpected {val!r}", at)

    def resolve(self, name: str, at: int) -> int:
        if self.names is not None:
            if name not in self.names:
                self.error(f"unknown variable {name!r}", at, VariableRangeError)
            return self.names[name]
        m = _DEFAULT_VAR.match(name)
        if m is None:
            self.error(f"unknown variable {name!r}", at, VariableRangeError)
        idx = int(m.group(1))
        if not 1 <= idx <= self.nvars:
            self.error(f"variable {name} outside x1..x{self.nvars}", at, VariableRangeError)
        return idx


def parse_poly(text: str, nvars: int, names: Sequence[str] | None = None, *, _base: int = 0) -> MultiPoly:
    """Parse ``text`` into a polynomial in ``nvars`` variables."""
    return _Parser(text, nvars, names, _base).parse()


def parse_scalar(text: str | int | Fraction) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    p = parse_poly(str(text), 1)
    if not p.is_constant():
        raise PolySyntaxError("expected a constant", 0)
    return p.constant_term()


def split_list(text: str) -> list[tuple[str, int]]:
    """Split ``[a, b, ...]`` at top-level commas; returns (item, byte offset) pairs."""
    stripped = text.strip()
    lead = len(text) - len(text.lstrip())
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise PolySyntaxError("expected a bracketed list", _byte_offset(text, lead))
    inner_start = lead + 1
    inner = stripped[1:-1]
    items: list[tuple[str, int]] = []
    depth = 0
    start = 0
    for i, ch in enumerate(inner):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            items.append((inner[start:i], _byte_offset(text, inner_start + start)))
            start = i + 1
    if inner.strip() or items:
        items.append((inner[start:], _byte_offset(text, inner_start + start)))
    return items


def parse_poly_list(text: str, nvars: int | None = None, names: Sequence[str] | None = None) -> tuple[MultiPoly, ...]:
    """Parse ``[p1, ..., pn]``; ``nvars`` defaults to the list length."""
    items = split_list(text)
    n = len(items) if nvars is None else nvars
    if not items:
        raise PolySyntaxError("empty list", 0)
    return tuple(parse_poly(item, n, names, _base=off) for item, off in items)


def parse_int_matrix(text: str) -> tuple[tuple[int, ...], ...]:
    """Parse ``[[w11, ..., w1n], ...]`` into integer rows."""
    rows = []
    for item, off in split_list(text):
        row = []
        for entry, eoff in split_list(item):
            try:
                row.append(int(entry.strip()))
            except ValueError:
                raise PolySyntaxError(f"expected an integer, got {entry.strip()!r}", off + eoff) from None
        rows.append(tuple(row))
    return tuple(rows)
