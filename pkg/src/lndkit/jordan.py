"""Jordan-Chevalley decomposition of locally finite derivations.

The derivation is restricted to a finite-dimensional invariant subspace
containing the generators, the matrix is split over Q without computing
eigenvalues, and the two parts are read back as derivations from their
values on the generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .derivations import (
    Derivation,
    FinitenessStatus,
    LndStatus,
    is_lnd,
    krylov,
    lie_bracket,
)
from .errors import LadderDivergesError, LiftInconsistentError, NotLocallyFiniteError
from .gradings import Grading, Weight, decompose_derivation
from .linalg import (
    EchelonBasis,
    Matrix,
    inverse,
    is_squarefree,
    is_zero_matrix,
    mat_mul,
    mat_sub,
    minimal_polynomial,
    charpoly,
    squarefree_part,
    to_matrix,
    upoly_deriv,
    upoly_eval_matrix,
)
from .poly import MultiPoly


@dataclass(frozen=True)
class InvariantSubspace:
    """A delta-stable span; ``matrix[i][j]`` is the coefficient of basis[i] in delta(basis[j])."""

    basis: tuple[MultiPoly, ...]
    matrix: Matrix
    contains_generators: bool
    _echelon: EchelonBasis = field(repr=False, compare=False, default=None)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, p: MultiPoly) -> list[Fraction] | None:
        coords = self._echelon.coordinates(p.terms)
        if coords is None:
            return None
        return [coords.get(j, Fraction(0)) for j in range(self.dim)]

    def combine(self, coords: Sequence[Fraction]) -> MultiPoly:
        out = MultiPoly.zero(self.basis[0].nvars)
        for c, b in zip(coords, self.basis):
            if c:
                out = out + b.scale(c)
        return out

    def act(self, matrix: Matrix, p: MultiPoly) -> MultiPoly:
        """Apply a matrix written in this basis to an element of the span."""
        coords = self.coordinates(p)
        if coords is None:
            raise ValueError(f"{p} is outside the subspace")
        return self.combine([sum((row[j] * coords[j] for j in range(self.dim)), Fraction(0)) for row in matrix])


def invariant_subspace(delta: Derivation, seeds: Sequence[MultiPoly] | None = None, bound: int = 64) -> InvariantSubspace:
    """Close span(seeds) under delta; fail once the dimension exceeds ``bound``."""
    if seeds is None:
        seeds = MultiPoly.generators(delta.nvars)
    if not seeds:
        raise ValueError("need at least one seed")
    echelon = EchelonBasis()
    basis: list[MultiPoly] = []
    for s in seeds:
        if echelon.add(s.terms):
            basis.append(s.exact())
    images: list[MultiPoly] = []
    j = 0
    while j < len(basis):
        img = delta.apply(basis[j])
        images.append(img)
        if echelon.add(img.terms):
            basis.append(img)
            if len(basis) > bound:
                raise NotLocallyFiniteError(
                    f"span of the seeds under delta exceeds dimension {bound}"
                )
        j += 1
    n = len(basis)
    matrix = [[Fraction(0)] * n for _ in range(n)]
    for j, img in enumerate(images):
        coords = echelon.coordinates(img.terms)
        for i, c in coords.items():
            matrix[i][j] = c
    gens = all(echelon.contains(x.terms) for x in MultiPoly.generators(delta.nvars))
    return InvariantSubspace(tuple(basis), matrix, gens, echelon)


def jordan_chevalley(m: Matrix) -> tuple[Matrix, Matrix]:
    """Split ``m`` into commuting semisimple S and nilpotent N over Q.

    Newton iteration S <- S - q(S) q'(S)^{-1} with q the squarefree part of
    the characteristic polynomial; q'(S) stays invertible because q and q'
    are coprime, and the iteration converges in O(log multiplicity) steps.
    """
    m = to_matrix(m)
    n = len(m)
    if n == 0:
        return [], []
    q = squarefree_part(charpoly(m))
    dq = upoly_deriv(q)
    s = m
    for _ in range(n + 1):
        qs = upoly_eval_matrix(q, s)
        if is_zero_matrix(qs):
            break
        s = mat_sub(s, mat_mul(qs, inverse(upoly_eval_matrix(dq, s))))
    else:  # pragma: no cover - convergence is guaranteed
        raise ArithmeticError("Chevalley iteration did not converge")
    return s, mat_sub(m, s)


@dataclass(frozen=True)
class JordanPair:
    semisimple: Derivation
    nilpotent: Derivation
    subspace: InvariantSubspace
    s_matrix: Matrix
    n_matrix: Matrix


def _lift(v: InvariantSubspace, matrix: Matrix, nvars: int) -> Derivation:
    images = []
    for x in MultiPoly.generators(nvars):
        images.append(v.act(matrix, x))
    return Derivation(images)


def jordan_decompose(delta: Derivation, bound: int = 64) -> JordanPair:
    """Semisimple and locally nilpotent parts of a locally finite derivation."""
    v = invariant_subspace(delta, None, bound)
    s_mat, n_mat = jordan_chevalley(v.matrix)
    ds = _lift(v, s_mat, delta.nvars)
    dn = _lift(v, n_mat, delta.nvars)
    problems = []
    if ds + dn != delta:
        problems.append("parts do not sum to delta")
    for j, b in enumerate(v.basis):
        if ds.apply(b) != v.act(s_mat, b):
            problems.append(f"semisimple part disagrees with its matrix on {b}")
            break
        if dn.apply(b) != v.act(n_mat, b):
            problems.append(f"nilpotent part disagrees with its matrix on {b}")
            break
    if not lie_bracket(ds, dn).is_zero():
        problems.append("parts do not commute")
    if is_lnd(dn, v.dim + 1).status is not LndStatus.PROVED_LND:
        problems.append("nilpotent part is not locally nilpotent")
    if not is_squarefree(minimal_polynomial(s_mat)):
        problems.append("semisimple matrix has a repeated factor in its minimal polynomial")
    if problems:
        raise LiftInconsistentError("; ".join(problems))
    return JordanPair(ds, dn, v, s_mat, n_mat)


@dataclass(frozen=True)
class LeibnizCheck:
    semisimple_leibniz: bool
    nilpotent_leibniz: bool
    semisimple_on_product: bool
    nilpotent_on_product: bool

    @property
    def ok(self) -> bool:
        return all((self.semisimple_leibniz, self.nilpotent_leibniz,
                    self.semisimple_on_product, self.nilpotent_on_product))


def leibniz_spot_check(pair: JordanPair, p: MultiPoly, q: MultiPoly) -> LeibnizCheck:
    """Check the lifted parts on the product of two elements of the subspace.

    The matrix parts act on p and q; their Leibniz extension must agree with
    the lifted derivations on p*q.  On the cyclic span of p*q the lifted
    semisimple part must have a squarefree local minimal polynomial and the
    lifted nilpotent part must kill p*q within a bounded number of steps,
    which by uniqueness makes them the Jordan parts there as well.
    """
    v = pair.subspace
    pq = p * q
    sp, sq = v.act(pair.s_matrix, p), v.act(pair.s_matrix, q)
    np_, nq = v.act(pair.n_matrix, p), v.act(pair.n_matrix, q)
    s_ok = pair.semisimple.apply(pq) == sp * q + p * sq
    n_ok = pair.nilpotent.apply(pq) == np_ * q + p * nq

    echelon = EchelonBasis()
    cur = pq
    steps = 0
    while echelon.add(cur.terms):
        cur = pair.semisimple.apply(cur)
        steps += 1
    coords = echelon.coordinates(cur.terms)
    local_min = [-coords.get(j, Fraction(0)) for j in range(steps)] + [Fraction(1)]
    semisimple_ok = is_squarefree(local_min)

    cur = pq
    limit = 2 * (v.dim + 1) * max(1, pq.degree() or 1) + 2
    for _ in range(limit):
        if not cur:
            break
        cur = pair.nilpotent.apply(cur)
    return LeibnizCheck(s_ok, n_ok, semisimple_ok, not cur)


def ad_conjugate(dp: Derivation, delta: Derivation, max_steps: int = 64) -> Derivation:
    """exp(ad dp)(delta) = sum_k ad_dp^k(delta) / k!, for a terminating ladder."""
    total = delta
    term = delta
    for k in range(1, max_steps + 1):
        term = lie_bracket(dp, term).scale(Fraction(1, k))
        if term.is_zero():
            return total
        total = total + term
    raise LadderDivergesError(f"ad ladder did not reach zero within {max_steps} steps")


@dataclass(frozen=True)
class ConjugationWitness:
    eigenvalues: dict[Weight, Fraction]
    shift: Derivation
    zero_part: Derivation
    bracket_identity: bool
    conjugate_identity: bool


@dataclass(frozen=True)
class ShiftReport:
    difference: Derivation
    reports: tuple
    status: FinitenessStatus
    conjugation: ConjugationWitness | None
    note: str = ""


def _eigenvalue(ds: Derivation, comp: Derivation) -> Fraction | None:
    """lambda with [ds, comp] = lambda * comp, or None."""
    br = lie_bracket(ds, comp)
    for a, b in zip(comp.images, br.images):
        if a:
            mono, c = a.sorted_terms()[0]
            lam = b.coefficient(mono) / c
            return lam if br == comp.scale(lam) else None
    return None


def _conjugation_witness(delta: Derivation, d: Derivation, g: Grading, bound: int) -> tuple[ConjugationWitness | None, str]:
    try:
        ds = jordan_decompose(delta, bound).semisimple
    except (NotLocallyFiniteError, LiftInconsistentError) as exc:
        return None, f"no Jordan decomposition: {exc}"
    eig: dict[Weight, Fraction] = {}
    shift = Derivation.zero(d.nvars)
    zero_part = Derivation.zero(d.nvars)
    for chi, comp in decompose_derivation(g, d).items():
        lam = _eigenvalue(ds, comp)
        if lam is None:
            return None, f"component at weight {chi} is not an eigenvector of the semisimple part"
        eig[chi] = lam
        if lam:
            shift = shift + comp.scale(1 / lam)
        else:
            zero_part = zero_part + comp
    bracket_ok = lie_bracket(delta, shift) == d - zero_part
    try:
        conj_ok = ad_conjugate(shift, delta) == delta - d + zero_part
    except LadderDivergesError:
        conj_ok = False
    return ConjugationWitness(eig, shift, zero_part, bracket_ok, conj_ok), ""


def semisimple_shift_check(delta: Derivation, d: Derivation, g: Grading | None, bound: int) -> ShiftReport:
    """Krylov test of delta - d on every generator.

    With a grading whose components of ``d`` are eigenvectors of the
    semisimple part of ``delta``, also builds the shift d' with
    [delta, d'] = d - d_0 and checks exp(ad d')(delta) = delta - d + d_0.
    """
    diff = delta - d
    reports = tuple(krylov(diff, x, bound) for x in MultiPoly.generators(delta.nvars))
    if all(r.status is FinitenessStatus.LOCALLY_FINITE_ON_SEED for r in reports):
        status = FinitenessStatus.LOCALLY_FINITE_ON_SEED
    elif any(r.status is FinitenessStatus.NOT_LOCALLY_FINITE for r in reports):
        status = FinitenessStatus.NOT_LOCALLY_FINITE
    else:
        status = FinitenessStatus.INCONCLUSIVE
    witness, note = (None, "no grading supplied")
    if g is not None and not d.is_zero():
        witness, note = _conjugation_witness(delta, d, g, bound)
    return ShiftReport(diff, reports, status, witness, note)
