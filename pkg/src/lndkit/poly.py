"""Exact sparse multivariate polynomials over Q.

A polynomial in ``nvars`` variables is a map from exponent tuples to nonzero
``Fraction`` coefficients.  Variables are numbered from 1 (``x1 .. xn``)
in every public function; exponent tuples are ordinary 0-based tuples.

Truncation models the completion at the origin: a polynomial computed under
a cap ``D`` has had every term of total degree ``>= D`` discarded and
remembers ``D`` in its ``cap`` attribute.  Caps propagate through arithmetic
(the smaller one wins) and are ignored by equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import NvarsMismatchError, ZeroInputError

Monomial = tuple[int, ...]
Scalar = Fraction
ScalarLike = Union[int, Fraction]


@dataclass(frozen=True)
class TruncContext:
    """Discard every term of total degree >= ``cap``."""

    cap: int

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError(f"truncation cap must be positive, got {self.cap}")


@dataclass(frozen=True)
class OrdAtLeast:
    """Order of a polynomial that vanished under a cap: all we know is ord >= bound."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


def _min_cap(*caps: int | None) -> int | None:
    present = [c for c in caps if c is not None]
    return min(present) if present else None


def _ctx_cap(ctx: TruncContext | None) -> int | None:
    return None if ctx is None else ctx.cap


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "_nvars", "_cap", "_hash")

    def __init__(
        self,
        terms: Mapping[Monomial, ScalarLike] | Iterable[tuple[Monomial, ScalarLike]] = (),
        nvars: int = 1,
        cap: int | None = None,
    ):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise NvarsMismatchError(f"monomial {mono} has length {len(mono)}, expected {nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            if cap is not None and sum(mono) >= cap:
                continue
            clean[mono] = clean.get(mono, Fraction(0)) + Fraction(coef)
        self._terms = {m: c for m, c in clean.items() if c != 0}
        self._nvars = nvars
        self._cap = cap
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], nvars: int, cap: int | None) -> MultiPoly:
        # caller guarantees: no zero coefficients, correct lengths, already truncated
        p = object.__new__(cls)
        p._terms = terms
        p._nvars = nvars
        p._cap = cap
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int, cap: int | None = None) -> MultiPoly:
        return cls._raw({}, nvars, cap)

    @classmethod
    def constant(cls, nvars: int, value: ScalarLike) -> MultiPoly:
        return cls({(0,) * nvars: value}, nvars)

    @classmethod
    def one(cls, nvars: int) -> MultiPoly:
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, i: int) -> MultiPoly:
        """The generator ``x_i`` (1-based)."""
        if not 1 <= i <= nvars:
            raise IndexError(f"variable index {i} outside 1..{nvars}")
        mono = [0] * nvars
        mono[i - 1] = 1
        return cls._raw({tuple(mono): Fraction(1)}, nvars, None)

    @classmethod
    def generators(cls, nvars: int) -> tuple[MultiPoly, ...]:
        return tuple(cls.variable(nvars, i) for i in range(1, nvars + 1))

    @classmethod
    def monomial(cls, exponents: Sequence[int], coef: ScalarLike = 1) -> MultiPoly:
        return cls({tuple(exponents): coef}, len(exponents))

    # basic accessors

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def nvars(self) -> int:
        return self._nvars

    @property
    def cap(self) -> int | None:
        return self._cap

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.sorted_terms())

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._terms)

    def coefficient(self, mono: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * self._nvars)

    def degree(self) -> int | None:
        """Maximal total degree, None for zero."""
        if not self._terms:
            return None
        return max(sum(m) for m in self._terms)

    def variables(self) -> frozenset[int]:
        """1-based indices of the variables that occur."""
        return frozenset(i + 1 for m in self._terms for i, e in enumerate(m) if e)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in descending graded-lex order (x1 > x2 > ...)."""
        return sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def with_cap(self, cap: int | None) -> MultiPoly:
        """Truncate at ``cap`` (no-op for None); the result remembers the tighter cap."""
        new_cap = _min_cap(self._cap, cap)
        if new_cap == self._cap:
            return self
        return MultiPoly._raw({m: c for m, c in self._terms.items() if sum(m) < new_cap}, self._nvars, new_cap)

    def exact(self) -> MultiPoly:
        """Same terms, cap forgotten."""
        return MultiPoly._raw(self._terms, self._nvars, None)

    # equality / hashing ignore the cap

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self._nvars == other._nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == MultiPoly.constant(self._nvars, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._nvars, frozenset(self._terms.items())))
        return self._hash

    # arithmetic

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other._nvars != self._nvars:
                raise NvarsMismatchError(f"nvars mismatch: {self._nvars} vs {other._nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self._nvars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def add(self, other, ctx: TruncContext | None = None, sign: int = 1) -> MultiPoly:
        other = self._coerce(other)
        cap = _min_cap(self._cap, other._cap, _ctx_cap(ctx))
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + sign * c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        if cap is not None:
            out = {m: c for m, c in out.items() if sum(m) < cap}
        return MultiPoly._raw(out, self._nvars, cap)

    def sub(self, other, ctx: TruncContext | None = None) -> MultiPoly:
        return self.add(other, ctx, sign=-1)

    def mul(self, other, ctx: TruncContext | None = None) -> MultiPoly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other, ctx)
        other = self._coerce(other)
        cap = _min_cap(self._cap, other._cap, _ctx_cap(ctx))
        if not self._terms or not other._terms:
            return MultiPoly._raw({}, self._nvars, cap)
        left = [(m, c, sum(m)) for m, c in self._terms.items()]
        right = [(m, c, sum(m)) for m, c in other._terms.items()]
        out: dict[Monomial, Fraction] = {}
        for ma, ca, da in left:
            for mb, cb, db in right:
                if cap is not None and da + db >= cap:
                    continue
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = out.get(m, 0) + ca * cb
        return MultiPoly._raw({m: c for m, c in out.items() if c}, self._nvars, cap)

    def scale(self, c: ScalarLike, ctx: TruncContext | None = None) -> MultiPoly:
        c = Fraction(c)
        cap = _min_cap(self._cap, _ctx_cap(ctx))
        if c == 0:
            return MultiPoly._raw({}, self._nvars, cap)
        terms = {m: v * c for m, v in self._terms.items() if cap is None or sum(m) < cap}
        return MultiPoly._raw(terms, self._nvars, cap)

    def pow(self, k: int, ctx: TruncContext | None = None) -> MultiPoly:
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.one(self._nvars).with_cap(_min_cap(self._cap, _ctx_cap(ctx)))
        base = self
        while k:
            if k & 1:
                result = result.mul(base, ctx)
            k >>= 1
            if k:
                base = base.mul(base, ctx)
        return result

    __add__ = add
    __mul__ = mul
    __pow__ = pow

    def __radd__(self, other) -> MultiPoly:
        return self.add(other)

    def __sub__(self, other) -> MultiPoly:
        return self.sub(other)

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other).sub(self)

    def __rmul__(self, other) -> MultiPoly:
        return self.mul(other)

    def __neg__(self) -> MultiPoly:
        return self.scale(-1)

    def __truediv__(self, c: ScalarLike) -> MultiPoly:
        return self.scale(1 / Fraction(c))

    # calculus and degree bookkeeping

    def diff(self, i: int) -> MultiPoly:
        """Partial derivative in ``x_i``."""
        k = i - 1
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            if m[k]:
                nm = m[:k] + (m[k] - 1,) + m[k + 1:]
                out[nm] = c * m[k]
        # a cap D on the input only guarantees degrees < D - 1 in the output
        cap = None if self._cap is None else self._cap - 1
        return MultiPoly._raw(out, self._nvars, cap)

    def integrate(self, i: int) -> MultiPoly:
        """Antiderivative in ``x_i`` with no ``x_i``-free monomials."""
        k = i - 1
        out = {m[:k] + (m[k] + 1,) + m[k + 1:]: c / (m[k] + 1) for m, c in self._terms.items()}
        cap = None if self._cap is None else self._cap + 1
        return MultiPoly._raw(out, self._nvars, cap)

    def component(self, d: int) -> MultiPoly:
        """Homogeneous component of total degree ``d``."""
        return MultiPoly._raw({m: c for m, c in self._terms.items() if sum(m) == d}, self._nvars, self._cap)

    def components(self) -> dict[int, MultiPoly]:
        out: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            out.setdefault(sum(m), {})[m] = c
        return {d: MultiPoly._raw(t, self._nvars, self._cap) for d, t in sorted(out.items())}

    def order(self) -> int | OrdAtLeast | None:
        """Lowest total degree; None for exact zero, ``OrdAtLeast(cap)`` for zero under a cap."""
        if not self._terms:
            return None if self._cap is None else OrdAtLeast(self._cap)
        return min(sum(m) for m in self._terms)

    def lhc(self) -> MultiPoly:
        o = self.order()
        if not isinstance(o, int):
            raise ZeroInputError("lowest homogeneous component of zero")
        return self.component(o)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self._terms}) <= 1

    def set_variable_zero(self, i: int) -> MultiPoly:
        k = i - 1
        return MultiPoly._raw({m: c for m, c in self._terms.items() if m[k] == 0}, self._nvars, self._cap)

    def subs(self, images: Sequence[MultiPoly], ctx: TruncContext | None = None) -> MultiPoly:
        """Substitute ``images[i-1]`` for ``x_i``; images may live in a different ring."""
        if len(images) != self._nvars:
            raise NvarsMismatchError(f"need {self._nvars} images, got {len(images)}")
        target = images[0].nvars if images else self._nvars
        for im in images:
            if im.nvars != target:
                raise NvarsMismatchError("substitution images disagree on nvars")
        cap = _min_cap(self._cap, _ctx_cap(ctx), *(im.cap for im in images))
        cctx = None if cap is None else TruncContext(cap)
        powers: list[list[MultiPoly]] = [[MultiPoly.one(target).with_cap(cap)] for _ in images]

        def power(j: int, e: int) -> MultiPoly:
            cache = powers[j]
            while len(cache) <= e:
                cache.append(cache[-1].mul(images[j], cctx))
            return cache[e]

        acc: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            term = None
            for j, e in enumerate(m):
                if e:
                    pj = power(j, e)
                    term = pj if term is None else term.mul(pj, cctx)
            if term is None:
                term = powers[0][0]
            for tm, tc in term._terms.items():
                v = acc.get(tm, 0) + c * tc
                if v:
                    acc[tm] = v
                else:
                    acc.pop(tm, None)
        return MultiPoly._raw(acc, target, cap)

    # division by a polynomial, used only to tidy rational-function witnesses

    def divide_exact(self, other: MultiPoly) -> MultiPoly | None:
        """Return q with self == q*other, or None if other does not divide self."""
        other = self._coerce(other)
        if not other:
            raise ZeroInputError("division by zero polynomial")
        key = lambda m: (sum(m), m)
        lead_b = max(other._terms, key=key)
        cb = other._terms[lead_b]
        rem = self.exact()
        quot: dict[Monomial, Fraction] = {}
        while rem:
            lead_r = max(rem._terms, key=key)
            if any(x < y for x, y in zip(lead_r, lead_b)):
                return None
            qm = tuple(x - y for x, y in zip(lead_r, lead_b))
            qc = rem._terms[lead_r] / cb
            quot[qm] = qc
            rem = rem.sub(MultiPoly._raw({qm: qc}, self._nvars, None).mul(other))
        return MultiPoly._raw(quot, self._nvars, None)

    def __repr__(self) -> str:
        cap = "" if self._cap is None else f", cap={self._cap}"
        return f"MultiPoly({format_poly(self)!r}, nvars={self._nvars}{cap})"

    def __str__(self) -> str:
        return format_poly(self)


# printing


def _format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _default_names(nvars: int) -> list[str]:
    return [f"x{i}" for i in range(1, nvars + 1)]


def format_monomial(mono: Monomial, names: Sequence[str] | None = None) -> str:
    names = names or _default_names(len(mono))
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


def format_poly(p: MultiPoly, names: Sequence[str] | None = None) -> str:
    """Canonical text form in descending graded-lex order; ``parse_poly`` inverts it."""
    if not p:
        return "0"
    out = []
    for k, (mono, coef) in enumerate(p.sorted_terms()):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        if sum(mono) == 0:
            body = _format_scalar(mag)
        elif mag == 1:
            body = format_monomial(mono, names)
        else:
            body = f"{_format_scalar(mag)}*{format_monomial(mono, names)}"
        if k == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# function-style surface


def arith(op: str, a: MultiPoly, b, ctx: TruncContext | None = None) -> MultiPoly:
    """Dispatch ``add``/``sub``/``mul``/``scale`` by name."""
    if op == "add":
        return a.add(b, ctx)
    if op == "sub":
        return a.sub(b, ctx)
    if op == "mul":
        return a.mul(b, ctx)
    if op == "scale":
        return a.scale(b, ctx)
    raise ValueError(f"unknown operation {op!r}")


def order(p: MultiPoly) -> int | OrdAtLeast | None:
    return p.order()


def lhc(p: MultiPoly) -> MultiPoly:
    return p.lhc()


def component(p: MultiPoly, d: int) -> MultiPoly:
    if d < 0:
        raise ValueError("degree must be non-negative")
    return p.component(d)


def partial_integrate(p: MultiPoly, i: int) -> MultiPoly:
    return p.integrate(i)


def partial_diff(p: MultiPoly, i: int) -> MultiPoly:
    return p.diff(i)
