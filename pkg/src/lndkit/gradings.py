"""Z^r-gradings given by integer weights on the variables.

Column i of the weight matrix is the weight of ``x_i``; a monomial gets the
sum of its variables' weights.  A derivation component of weight ``chi``
sends weight ``mu`` to weight ``mu + chi``, so on ``x_i`` it equals the
``(chi + w_i)``-component of the image ``z(x_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .derivations import Derivation, LndStatus, NilpotencyVerdict, is_lnd
from .errors import UnsupportedRankError, ZeroInputError
from .parse import parse_int_matrix
from .poly import Monomial, MultiPoly

Weight = tuple[int, ...]


@dataclass(frozen=True)
class Grading:
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(w) for w in row) for row in self.weights)
        if not rows:
            raise ValueError("a grading needs at least one weight row")
        if len({len(r) for r in rows}) != 1 or not rows[0]:
            raise ValueError("weight rows must be nonempty and of equal length")
        object.__setattr__(self, "weights", rows)

    @classmethod
    def total_degree(cls, nvars: int) -> Grading:
        return cls(((1,) * nvars,))

    @classmethod
    def parse(cls, text: str) -> Grading:
        return cls(parse_int_matrix(text))

    @property
    def rank(self) -> int:
        return len(self.weights)

    @property
    def nvars(self) -> int:
        return len(self.weights[0])

    def variable_weight(self, i: int) -> Weight:
        """Weight of ``x_i`` (1-based)."""
        return tuple(row[i - 1] for row in self.weights)

    def weight(self, mono: Monomial) -> Weight:
        return tuple(sum(w * e for w, e in zip(row, mono)) for row in self.weights)

    def is_homogeneous(self, p: MultiPoly) -> bool:
        return len({self.weight(m) for m in p.terms}) <= 1

    def format(self) -> str:
        return "[" + ", ".join("[" + ", ".join(map(str, r)) + "]" for r in self.weights) + "]"

    def __str__(self) -> str:
        return self.format()


def _check_nvars(g: Grading, n: int):
    if g.nvars != n:
        raise ValueError(f"grading has {g.nvars} columns but the ring has {n} variables")


def decompose_poly(g: Grading, p: MultiPoly) -> dict[Weight, MultiPoly]:
    _check_nvars(g, p.nvars)
    parts: dict[Weight, dict] = {}
    for m, c in p.terms.items():
        parts.setdefault(g.weight(m), {})[m] = c
    return {w: MultiPoly(t, p.nvars) for w, t in sorted(parts.items())}


def decompose_derivation(g: Grading, z: Derivation) -> dict[Weight, Derivation]:
    _check_nvars(g, z.nvars)
    n = z.nvars
    parts: dict[Weight, list[MultiPoly]] = {}
    for i, im in enumerate(z.images, 1):
        wi = g.variable_weight(i)
        for mu, comp in decompose_poly(g, im).items():
            chi = tuple(a - b for a, b in zip(mu, wi))
            slot = parts.setdefault(chi, [MultiPoly.zero(n)] * n)
            slot[i - 1] = comp
    return {chi: Derivation(imgs) for chi, imgs in sorted(parts.items())}


@dataclass(frozen=True)
class WeightPolytope:
    points: tuple[Weight, ...]
    vertices: tuple[Weight, ...]


def _cross(o: Weight, a: Weight, b: Weight) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_vertices(points: Sequence[Weight]) -> tuple[Weight, ...]:
    """Extreme points of a finite set in dimension 1 or 2.

    In dimension 2 the vertices come back counterclockwise from the
    lexicographically smallest one (Andrew's monotone chain; collinear
    boundary points are dropped).
    """
    pts = sorted(set(points))
    if not pts:
        return ()
    dim = len(pts[0])
    if dim == 1:
        return (pts[0],) if len(pts) == 1 else (pts[0], pts[-1])
    if dim != 2:
        raise UnsupportedRankError(f"hulls are implemented for rank 1 and 2, not {dim}")
    if len(pts) <= 2:
        return tuple(pts)
    lower: list[Weight] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Weight] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    # all points collinear: the chain degenerates to the two endpoints
    return tuple(hull) if len(hull) > 1 else (pts[0], pts[-1])


def weight_polytope(g: Grading, z: Derivation) -> WeightPolytope:
    if g.rank > 2:
        raise UnsupportedRankError(f"weight polytopes support rank <= 2, got {g.rank}")
    if z.is_zero():
        raise ZeroInputError("the zero derivation has no weight polytope")
    points = tuple(decompose_derivation(g, z))
    return WeightPolytope(points, convex_hull_vertices(points))


@dataclass(frozen=True)
class VertexCheck:
    weight: Weight
    component: Derivation
    verdict: NilpotencyVerdict


@dataclass(frozen=True)
class VertexReport:
    polytope: WeightPolytope
    checks: tuple[VertexCheck, ...]

    @property
    def all_proved(self) -> bool:
        return all(c.verdict.status is LndStatus.PROVED_LND for c in self.checks)

    @property
    def status(self) -> str:
        if self.all_proved:
            return "ALL_VERTICES_LND"
        if any(c.verdict.status is LndStatus.REFUTED for c in self.checks):
            return "VERTEX_REFUTED"
        return "INCONCLUSIVE"


def check_vertex_lnd(g: Grading, z: Derivation, bound: int) -> VertexReport:
    """Run ``is_lnd`` on the component at every nonzero vertex of P(z).

    For locally finite z every such component should be locally nilpotent.
    The caller is responsible for the local-finiteness hypothesis; a
    refuted vertex on an input that is not locally finite is expected.
    """
    poly = weight_polytope(g, z)
    comps = decompose_derivation(g, z)
    checks = tuple(
        VertexCheck(v, comps[v], is_lnd(comps[v], bound))
        for v in poly.vertices
        if any(v)
    )
    return VertexReport(poly, checks)
