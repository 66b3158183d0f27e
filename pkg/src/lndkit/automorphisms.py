"""Polynomial endomorphisms handled through their pullbacks.

``PolyEndo.images[i]`` is the pullback of ``x_{i+1}``.  ``compose(a, b)`` is
the map a o b, so its pullback is ``b* o a*``: the images of ``a`` with the
images of ``b`` substituted in.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial
from typing import Sequence

from .derivations import Derivation, LndStatus, is_lnd
from .errors import (
    CapTooSmallError,
    NonInvertibleError,
    NotExponentiableError,
    NvarsMismatchError,
    PreconditionError,
)
from .linalg import EchelonBasis
from .parse import parse_poly_list
from .poly import MultiPoly, ScalarLike, TruncContext, format_poly

CONVENTION = "pullback-compose: (a∘b)* = b*∘a*"


def _min_cap(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class PolyEndo:
    """Ring endomorphism of Q[x1..xn], optionally known only modulo degree ``cap``.

    A capped endomorphism must fix the origin (no constant terms in its
    images); otherwise truncation would not commute with pullback.
    """

    __slots__ = ("images", "nvars", "cap", "_inverse")

    def __init__(self, images: Sequence[MultiPoly], cap: int | None = None,
                 inverse_images: Sequence[MultiPoly] | None = None):
        images = tuple(im.with_cap(cap) for im in images)
        if not images:
            raise ValueError("an endomorphism needs at least one image")
        n = len(images)
        if any(im.nvars != n for im in images):
            raise NvarsMismatchError("endomorphism images must live in the same ring")
        if cap is not None and any(im.constant_term() for im in images):
            raise PreconditionError("a truncated endomorphism must fix the origin")
        self.images = images
        self.nvars = n
        self.cap = cap
        self._inverse = None if inverse_images is None else tuple(im.with_cap(cap) for im in inverse_images)

    @classmethod
    def identity(cls, nvars: int, cap: int | None = None) -> PolyEndo:
        gens = MultiPoly.generators(nvars)
        return cls(gens, cap, gens)

    @classmethod
    def parse(cls, text: str, cap: int | None = None, nvars: int | None = None,
              names: Sequence[str] | None = None) -> PolyEndo:
        return cls(parse_poly_list(text, nvars, names), cap)

    @property
    def invertible(self) -> bool:
        return self._inverse is not None

    def inverse(self) -> PolyEndo:
        if self._inverse is None:
            raise NonInvertibleError("no inverse is known for this endomorphism")
        return PolyEndo(self._inverse, self.cap, self.images)

    def fixes_origin(self) -> bool:
        return not any(im.constant_term() for im in self.images)

    def pullback(self, p: MultiPoly) -> MultiPoly:
        if p.nvars != self.nvars:
            raise NvarsMismatchError(f"endomorphism on {self.nvars} variables applied to {p.nvars}")
        ctx = None if self.cap is None else TruncContext(self.cap)
        return p.subs(self.images, ctx)

    __call__ = pullback

    def is_identity(self) -> bool:
        return all(im == x for im, x in zip(self.images, MultiPoly.generators(self.nvars)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyEndo):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def format(self, names: Sequence[str] | None = None) -> str:
        return "[" + ", ".join(format_poly(im, names) for im in self.images) + "]"

    def __repr__(self) -> str:
        cap = "" if self.cap is None else f", cap={self.cap}"
        return f"PolyEndo({self.format()!r}{cap})"

    __str__ = format


def _exp_images(d: Derivation, t: Fraction, ctx: TruncContext | None) -> list[MultiPoly]:
    images = []
    for x in MultiPoly.generators(d.nvars):
        total = x.with_cap(None if ctx is None else ctx.cap)
        cur = x
        k = 0
        while True:
            k += 1
            cur = d.apply(cur, ctx)
            if not cur:
                break
            total = total + cur.scale(t ** k / factorial(k))
        images.append(total)
    return images


def raises_order(d: Derivation) -> bool:
    """True when every nonzero generator image has order at least 2."""
    return all(im.order() >= 2 for im in d.images if im)


def exp_derivation(d: Derivation, t: ScalarLike = 1, ctx: TruncContext | None = None,
                   bound: int = 64) -> PolyEndo:
    """exp(t*d) as an endomorphism: x_i -> sum_k t^k d^k(x_i) / k!.

    Exact when ``d`` is certified locally nilpotent within ``bound``.
    Otherwise a cap is required and ``d`` must raise the order of every
    generator, so the series terminates modulo the cap.
    """
    t = Fraction(t)
    if t == 0:
        return PolyEndo.identity(d.nvars, None if ctx is None else ctx.cap)
    if is_lnd(d, bound).status is LndStatus.PROVED_LND:
        cap = None if ctx is None else ctx.cap
        return PolyEndo(_exp_images(d, t, ctx), cap, _exp_images(d, -t, ctx))
    if ctx is not None and raises_order(d):
        return PolyEndo(_exp_images(d, t, ctx), ctx.cap, _exp_images(d, -t, ctx))
    raise NotExponentiableError(
        f"exp(t*{d}) needs a local-nilpotency certificate or an order-raising derivation with a cap"
    )


def compose(a: PolyEndo, b: PolyEndo) -> PolyEndo:
    """The map a o b (``b`` acts on points first); its pullback is b* o a*."""
    if a.nvars != b.nvars:
        raise NvarsMismatchError(f"nvars mismatch: {a.nvars} vs {b.nvars}")
    cap = _min_cap(a.cap, b.cap)
    if cap is not None and not (a.fixes_origin() and b.fixes_origin()):
        raise PreconditionError("truncated composition needs origin-fixing maps")
    b_t = b if b.cap == cap else PolyEndo(b.images, cap, b._inverse)
    images = [b_t.pullback(im.with_cap(cap)) for im in a.images]
    inverse = None
    if a.invertible and b.invertible:
        a_inv = PolyEndo(a._inverse, cap)
        inverse = [a_inv.pullback(im.with_cap(cap)) for im in b._inverse]
    return PolyEndo(images, cap, inverse)


def group_commutator(a: PolyEndo, b: PolyEndo) -> PolyEndo:
    """a o b o a^-1 o b^-1."""
    if not (a.invertible and b.invertible):
        raise NonInvertibleError("group commutator needs invertible (exp-built) inputs")
    return compose(compose(compose(a, b), a.inverse()), b.inverse())


def h_operator(g: PolyEndo, p: MultiPoly) -> MultiPoly:
    """g*(p) - p."""
    return g.pullback(p) - p


# algebraicity probe


class ProbeStatus(str, Enum):
    ALGEBRAIC_BEHAVIOR = "ALGEBRAIC_BEHAVIOR"
    NON_ALGEBRAIC = "NON_ALGEBRAIC"
    INCONCLUSIVE = "INCONCLUSIVE"


PROBE_FOOTNOTE = (
    "lhc_degrees[i] is the total degree of the lowest homogeneous component "
    "of h^i(seed); NON_ALGEBRAIC is bounded evidence up to the stated budget"
)


@dataclass(frozen=True)
class ProbeReport:
    seed: MultiPoly
    lhc_degrees: tuple
    dims: tuple[int, ...]
    status: ProbeStatus
    budget: int
    cap: int
    progression_step: int | None
    footnote: str = PROBE_FOOTNOTE


def _pullback_degree(g: PolyEndo, p: MultiPoly) -> int:
    degs = [im.degree() or 0 for im in g.images]
    return max((sum(e * d for e, d in zip(m, degs)) for m in p.terms), default=0)


def algebraicity_probe(g: PolyEndo, seed: MultiPoly, budget: int, ctx: TruncContext) -> ProbeReport:
    """Iterate h = g* - id on ``seed`` under ``ctx`` and watch the lowest degrees.

    Values are tracked as lossless while no truncation could have discarded
    a term.  A value that vanishes after a lossy step is indistinguishable
    from one of order >= cap, which raises CapTooSmallError.
    """
    if not seed:
        raise PreconditionError("probe seed must be nonzero")
    cap = _min_cap(ctx.cap, g.cap)
    if not g.fixes_origin() and g.cap is not None:
        raise PreconditionError("truncated probe needs an origin-fixing map")
    work = g if g.cap == cap or not g.fixes_origin() else PolyEndo(g.images, cap)
    cur = seed.with_cap(cap) if g.fixes_origin() else seed
    lossless = seed.degree() < cap
    basis = EchelonBasis()
    degrees: list[int | None] = []
    dims: list[int] = []
    for i in range(budget + 1):
        if i:
            if cur:
                lossless = lossless and _pullback_degree(g, cur) < cap
                if not g.fixes_origin() and not lossless:
                    raise CapTooSmallError(f"h^{i}(seed) leaves degrees below {cap} for a map moving the origin")
                cur = h_operator(work, cur)
            if not cur and not lossless:
                raise CapTooSmallError(f"h^{i}(seed) vanished below the cap {cap}; raise the cap")
        o = cur.order()
        degrees.append(o if isinstance(o, int) else None)
        basis.add(cur.terms)
        dims.append(basis.rank)
    ints = [d for d in degrees if d is not None]
    increasing = len(ints) == len(degrees) and all(a < b for a, b in zip(ints, ints[1:]))
    diffs = {b - a for a, b in zip(ints, ints[1:])}
    step = diffs.pop() if len(diffs) == 1 and len(ints) == len(degrees) else None
    stabilized = any(b == a for a, b in zip(dims, dims[1:]))
    if increasing:
        status = ProbeStatus.NON_ALGEBRAIC
    elif lossless and stabilized:
        status = ProbeStatus.ALGEBRAIC_BEHAVIOR
    else:
        status = ProbeStatus.INCONCLUSIVE
    return ProbeReport(seed, tuple(degrees), tuple(dims), status, budget, cap, step)
