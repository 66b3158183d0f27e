"""Derivations of Q[x1..xn] stored as their values on the generators.

Besides application and the Lie bracket this module holds the bounded
certificates used throughout the package:

* ``is_lnd`` proves local nilpotency by driving every generator to zero, and
  refutes it only with a sound non-termination argument.
* ``krylov`` tracks the span of the iterates of a seed with exact Gaussian
  elimination.
* ``equivalent`` checks proportionality of two LNDs plus kernel membership of
  their ratio.

A derivation has a grading by total degree: ``D`` is homogeneous of degree
``e`` when every image ``D(x_i)`` is homogeneous of degree ``e + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import NvarsMismatchError, ZeroInputError
from .linalg import EchelonBasis
from .parse import parse_poly_list
from .poly import MultiPoly, ScalarLike, TruncContext, format_poly


class Derivation:
    """A derivation, determined by the images of ``x1 .. xn``."""

    __slots__ = ("images", "nvars")

    def __init__(self, images: Sequence[MultiPoly]):
        images = tuple(images)
        if not images:
            raise ValueError("a derivation needs at least one generator image")
        n = len(images)
        for im in images:
            if im.nvars != n:
                raise NvarsMismatchError(f"image {im} has nvars {im.nvars}, expected {n}")
        self.images = images
        self.nvars = n

    @classmethod
    def zero(cls, nvars: int) -> Derivation:
        return cls([MultiPoly.zero(nvars)] * nvars)

    @classmethod
    def partial(cls, nvars: int, i: int) -> Derivation:
        """The coordinate field d/dx_i."""
        return cls([MultiPoly.constant(nvars, int(j == i)) for j in range(1, nvars + 1)])

    @classmethod
    def parse(cls, text: str, nvars: int | None = None, names: Sequence[str] | None = None) -> Derivation:
        return cls(parse_poly_list(text, nvars, names))

    def __call__(self, p: MultiPoly, ctx: TruncContext | None = None) -> MultiPoly:
        return self.apply(p, ctx)

    def apply(self, p: MultiPoly, ctx: TruncContext | None = None) -> MultiPoly:
        """Leibniz extension: sum of dp/dx_i * D(x_i).

        When ``p`` carries a cap D the result is only known below
        D - 1 + min ord(D(x_i)), and is truncated there.
        """
        if p.nvars != self.nvars:
            raise NvarsMismatchError(f"derivation on {self.nvars} variables applied to {p.nvars}")
        exact = p.exact()
        result = MultiPoly.zero(self.nvars)
        for i, im in enumerate(self.images, 1):
            if im:
                result = result.add(exact.diff(i).mul(im, ctx), ctx)
        cap = None if ctx is None else ctx.cap
        if p.cap is not None:
            lows = [im.order() for im in self.images if im]
            if lows:
                known = p.cap - 1 + min(lows)
                cap = known if cap is None else min(cap, known)
        return result.with_cap(cap)

    # vector-space structure

    def _check(self, other: Derivation):
        if other.nvars != self.nvars:
            raise NvarsMismatchError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: Derivation) -> Derivation:
        self._check(other)
        return Derivation([a + b for a, b in zip(self.images, other.images)])

    def __sub__(self, other: Derivation) -> Derivation:
        self._check(other)
        return Derivation([a - b for a, b in zip(self.images, other.images)])

    def __neg__(self) -> Derivation:
        return self.scale(-1)

    def scale(self, c: ScalarLike) -> Derivation:
        return Derivation([im.scale(c) for im in self.images])

    def times(self, f: MultiPoly) -> Derivation:
        """The derivation f * D."""
        return Derivation([f * im for im in self.images])

    def __rmul__(self, other) -> Derivation:
        if isinstance(other, MultiPoly):
            return self.times(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def is_zero(self) -> bool:
        return not any(self.images)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def format(self, names: Sequence[str] | None = None) -> str:
        return "[" + ", ".join(format_poly(im, names) for im in self.images) + "]"

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Derivation({self.format()!r})"

    def bracket(self, other: Derivation) -> Derivation:
        return lie_bracket(self, other)

    # total-degree grading

    def degree_components(self) -> dict[int, Derivation]:
        """Homogeneous components by total degree, zero ones omitted."""
        parts: dict[int, list[MultiPoly]] = {}
        for i, im in enumerate(self.images):
            for d, comp in im.components().items():
                slot = parts.setdefault(d - 1, [MultiPoly.zero(self.nvars)] * self.nvars)
                slot[i] = comp
        return {e: Derivation(imgs) for e, imgs in sorted(parts.items())}

    def lowest_component(self) -> tuple[int, Derivation]:
        """(degree, component) of the lowest nonzero homogeneous component."""
        comps = self.degree_components()
        if not comps:
            raise ZeroInputError("zero derivation has no lowest component")
        e = min(comps)
        return e, comps[e]


def lie_bracket(d1: Derivation, d2: Derivation) -> Derivation:
    """[d1, d2] = d1 o d2 - d2 o d1, evaluated on generators."""
    d1._check(d2)
    return Derivation([d1.apply(b) - d2.apply(a) for a, b in zip(d1.images, d2.images)])


def apply(d: Derivation, p: MultiPoly, ctx: TruncContext | None = None) -> MultiPoly:
    return d.apply(p, ctx)


def iterates(d: Derivation, p: MultiPoly, ctx: TruncContext | None = None) -> Iterator[MultiPoly]:
    """p, d(p), d^2(p), ... (infinite)."""
    cur = p if ctx is None else p.with_cap(ctx.cap)
    while True:
        yield cur
        cur = d.apply(cur, ctx)


# growth certificate


@dataclass(frozen=True)
class GrowthCertificate:
    """Proof that the iterates of a seed never vanish.

    Let L be the lowest component of D, of degree ``step`` >= 0.  If the
    lowest homogeneous component of the seed has coefficients of one sign and
    only involves a set V of variables such that, for each j in V, L(x_j) is
    nonzero, has nonnegative coefficients and only involves variables of V,
    then L^k applied to it is a nonzero polynomial for every k (no
    cancellation can occur).  It is the lowest homogeneous component of
    D^k(seed), so ord(D^k(seed)) = ord(seed) + k * step for all k.
    """

    step: int
    start_order: int
    variables: tuple[int, ...]

    def predicted_order(self, k: int) -> int:
        return self.start_order + k * self.step


def growth_certificate(d: Derivation, seed: MultiPoly, min_step: int = 0) -> GrowthCertificate | None:
    if d.is_zero() or not isinstance(seed.order(), int):
        return None
    step, low = d.lowest_component()
    if step < min_step:
        return None
    lead = seed.lhc()
    coefs = list(lead.terms.values())
    if all(c < 0 for c in coefs):
        lead = -lead
    elif any(c < 0 for c in coefs):
        return None
    if lead.is_constant():
        return None
    closure = set(lead.variables())
    todo = list(closure)
    while todo:
        j = todo.pop()
        img = low.images[j - 1]
        if not img or any(c < 0 for c in img.terms.values()):
            return None
        for v in img.variables() - closure:
            closure.add(v)
            todo.append(v)
    return GrowthCertificate(step, lead.order(), tuple(sorted(closure)))


# local nilpotency


class LndStatus(str, Enum):
    PROVED_LND = "PROVED_LND"
    REFUTED = "REFUTED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class NilpotencyVerdict:
    status: LndStatus
    witness: dict
    bound: int

    @property
    def proved(self) -> bool:
        return self.status is LndStatus.PROVED_LND


def _normalized(p: MultiPoly) -> MultiPoly:
    lead = p.sorted_terms()[0][1]
    return p.scale(1 / lead)


def is_lnd(d: Derivation, bound: int = 32) -> NilpotencyVerdict:
    """Bounded local-nilpotency check on the generators.

    PROVED_LND records for each generator the least k with D^k(x_i) = 0;
    that suffices on a polynomial ring.  REFUTED needs one of two sound
    witnesses on some generator: an iterate equal to a nonzero multiple of
    an earlier one (then no later iterate can vanish), or a growth
    certificate with nonnegative step.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    orders: list[int | None] = []
    for i, x in enumerate(MultiPoly.generators(d.nvars), 1):
        seen = {_normalized(x): 0}
        ords = []
        reached = None
        cur = x
        for k in range(1, bound + 1):
            cur = d.apply(cur)
            if not cur:
                reached = k
                break
            ords.append(cur.order())
            key = _normalized(cur)
            if key in seen:
                return NilpotencyVerdict(
                    LndStatus.REFUTED,
                    {"generator": i, "reason": "repeat", "iterate": k, "repeats": seen[key]},
                    bound,
                )
            seen[key] = k
        if reached is None:
            cert = growth_certificate(d, x, min_step=0)
            if cert is not None:
                return NilpotencyVerdict(
                    LndStatus.REFUTED,
                    {"generator": i, "reason": "growth", "step": cert.step,
                     "variables": list(cert.variables), "orders": ords},
                    bound,
                )
        orders.append(reached)
    if all(o is not None for o in orders):
        return NilpotencyVerdict(LndStatus.PROVED_LND, {"orders": orders}, bound)
    pending = [i for i, o in enumerate(orders, 1) if o is None]
    return NilpotencyVerdict(LndStatus.INCONCLUSIVE, {"orders": orders, "pending": pending}, bound)


# local finiteness


class FinitenessStatus(str, Enum):
    LOCALLY_FINITE_ON_SEED = "LOCALLY_FINITE_ON_SEED"
    NOT_LOCALLY_FINITE = "NOT_LOCALLY_FINITE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class FinitenessReport:
    seed: MultiPoly
    dims: tuple[int, ...]
    orders: tuple
    status: FinitenessStatus
    bound: int
    stabilized_at: int | None = None
    certificate: GrowthCertificate | None = field(default=None, compare=False)


def krylov(d: Derivation, f: MultiPoly, bound: int, ctx: TruncContext | None = None) -> FinitenessReport:
    """Dimensions of span{f, Df, ..., D^k f} for k < bound.

    Stabilization of the span proves local finiteness on ``f`` only for
    exact arithmetic; under a cap it is reported as INCONCLUSIVE.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    basis = EchelonBasis()
    dims: list[int] = []
    orders: list = []
    stabilized = None
    for k, cur in zip(range(bound), iterates(d, f, ctx)):
        orders.append(cur.order())
        basis.add(cur.terms)
        dims.append(basis.rank)
        if stabilized is None and k > 0 and dims[-1] == dims[-2]:
            stabilized = k
    status = FinitenessStatus.INCONCLUSIVE
    cert = growth_certificate(d, f, min_step=1)
    known = [o for o in orders if isinstance(o, int)]
    if cert is not None and all(a < b for a, b in zip(known, known[1:])):
        status = FinitenessStatus.NOT_LOCALLY_FINITE
    elif stabilized is not None and ctx is None:
        status = FinitenessStatus.LOCALLY_FINITE_ON_SEED
    return FinitenessReport(f, tuple(dims), tuple(orders), status, bound, stabilized, cert)


# equivalence of LNDs


class EquivalenceStatus(str, Enum):
    EQUIVALENT = "EQUIVALENT"
    NOT_EQUIVALENT = "NOT_EQUIVALENT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: EquivalenceStatus
    witness: dict


def _ratio(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    q = num.divide_exact(den)
    if q is not None:
        return q, MultiPoly.one(num.nvars)
    q = den.divide_exact(num)
    if q is not None:
        lead = q.sorted_terms()[0][1]
        return MultiPoly.constant(num.nvars, 1 / lead), q.scale(1 / lead)
    lead = den.sorted_terms()[0][1]
    return num.scale(1 / lead), den.scale(1 / lead)


def equivalent(d1: Derivation, d2: Derivation, bound: int = 32) -> EquivalenceVerdict:
    """Decide whether two LNDs are proportional with a ratio in both kernels.

    The witness ``c = (num, den)`` satisfies d2 = (num/den) * d1.  Pairs in
    NOT_EQUIVALENT witnesses are 1-based generator labels.
    """
    d1._check(d2)
    if d1.is_zero() or d2.is_zero():
        raise ZeroInputError("equivalence is undefined for the zero derivation")
    v1, v2 = is_lnd(d1, bound), is_lnd(d2, bound)
    if not (v1.proved and v2.proved):
        return EquivalenceVerdict(
            EquivalenceStatus.INCONCLUSIVE,
            {"nilpotency": [v1.status.value, v2.status.value]},
        )
    a, b = d1.images, d2.images
    n = d1.nvars
    for i in range(n):
        for j in range(i + 1, n):
            if a[i] * b[j] != a[j] * b[i]:
                return EquivalenceVerdict(EquivalenceStatus.NOT_EQUIVALENT, {"pair": [i + 1, j + 1]})
    k = next(i for i in range(n) if a[i])
    num, den = _ratio(b[k], a[k])
    for label, d in ((1, d1), (2, d2)):
        if d.apply(num) * den - num * d.apply(den):
            return EquivalenceVerdict(
                EquivalenceStatus.NOT_EQUIVALENT,
                {"kernel": label, "c": (num, den)},
            )
    return EquivalenceVerdict(
        EquivalenceStatus.EQUIVALENT,
        {"c": (num, den), "index": k + 1},
    )
