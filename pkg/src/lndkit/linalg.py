"""Exact linear algebra over Q: sparse echelon bases, dense matrices, and
univariate polynomials stored as coefficient lists (constant term first).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Mapping, Sequence

Matrix = list[list[Fraction]]
UPoly = list[Fraction]


class EchelonBasis:
    """Incremental Gaussian elimination on sparse vectors.

    Vectors are mappings from hashable, mutually comparable keys to
    Fractions.  ``reduce`` returns the residual of a vector together with its
    coordinates with respect to the vectors accepted so far (by insertion
    index), so the residual is zero exactly when the vector lies in the span.
    """

    def __init__(self):
        self._rows: list[tuple[Hashable, dict, dict[int, Fraction]]] = []
        self._count = 0

    @property
    def rank(self) -> int:
        return self._count

    def reduce(self, vec: Mapping) -> tuple[dict, dict[int, Fraction]]:
        v = {k: Fraction(c) for k, c in vec.items() if c}
        coords: dict[int, Fraction] = {}
        for pivot, row, combo in self._rows:
            c = v.get(pivot)
            if not c:
                continue
            for k, rc in row.items():
                nv = v.get(k, 0) - c * rc
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for j, cc in combo.items():
                nc = coords.get(j, 0) + c * cc
                if nc:
                    coords[j] = nc
                else:
                    coords.pop(j, None)
        return v, coords

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec`` if it is independent of the current span."""
        residual, coords = self.reduce(vec)
        if not residual:
            return False
        pivot = max(residual)
        inv = 1 / residual[pivot]
        row = {k: c * inv for k, c in residual.items()}
        # residual = vec - sum(coords[j] * v_j)
        combo = {j: -c * inv for j, c in coords.items()}
        combo[self._count] = inv
        self._rows.append((pivot, row, combo))
        self._count += 1
        return True

    def coordinates(self, vec: Mapping) -> dict[int, Fraction] | None:
        """Coordinates of ``vec`` in the inserted vectors, or None outside the span."""
        residual, coords = self.reduce(vec)
        return None if residual else coords


def rank(vectors: Sequence[Mapping]) -> int:
    basis = EchelonBasis()
    for v in vectors:
        basis.add(v)
    return basis.rank


# dense matrices


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int) -> Matrix:
    return [[Fraction(0)] * n for _ in range(n)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def is_zero_matrix(a: Matrix) -> bool:
    return all(x == 0 for row in a for x in row)


def mat_pow(a: Matrix, k: int) -> Matrix:
    result = identity(len(a))
    for _ in range(k):
        result = mat_mul(result, a)
    return result


def trace(a: Matrix) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises ZeroDivisionError for singular input."""
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def charpoly(a: Matrix) -> UPoly:
    """Characteristic polynomial det(tI - a) by Faddeev-LeVerrier."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = zeros(n)
    for k in range(1, n + 1):
        m = mat_add(mat_mul(a, m), mat_scale(identity(n), coeffs[n - k + 1]))
        coeffs[n - k] = -trace(mat_mul(a, m)) / k
    return coeffs


# univariate polynomials


def upoly_trim(p: Sequence[Fraction]) -> UPoly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def upoly_deriv(p: UPoly) -> UPoly:
    return upoly_trim([k * c for k, c in enumerate(p)][1:])


def upoly_divmod(a: UPoly, b: UPoly) -> tuple[UPoly, UPoly]:
    a = upoly_trim(a)
    b = upoly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        shift = len(r) - len(b)
        c = r[-1] / b[-1]
        q[shift] = c
        for i, bc in enumerate(b):
            r[shift + i] -= c * bc
        r = upoly_trim(r)
    return upoly_trim(q), r


def upoly_monic(p: UPoly) -> UPoly:
    p = upoly_trim(p)
    return [c / p[-1] for c in p] if p else p


def upoly_gcd(a: UPoly, b: UPoly) -> UPoly:
    a, b = upoly_trim(a), upoly_trim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    return upoly_monic(a)


def squarefree_part(p: UPoly) -> UPoly:
    """Product of the distinct irreducible factors of ``p`` (monic)."""
    g = upoly_gcd(p, upoly_deriv(p))
    return upoly_monic(upoly_divmod(p, g)[0])


def is_squarefree(p: UPoly) -> bool:
    return len(upoly_gcd(p, upoly_deriv(p))) == 1


def upoly_eval_matrix(p: UPoly, a: Matrix) -> Matrix:
    """Horner evaluation of ``p`` at the square matrix ``a``."""
    n = len(a)
    result = zeros(n)
    for c in reversed(upoly_trim(p)):
        result = mat_add(mat_mul(result, a), mat_scale(identity(n), c))
    return result


def minimal_polynomial(a: Matrix) -> UPoly:
    """Monic minimal polynomial, found as the first linear relation among I, a, a^2, ..."""
    n = len(a)
    basis = EchelonBasis()
    power = identity(n)
    k = 0
    while True:
        vec = {(i, j): x for i, row in enumerate(power) for j, x in enumerate(row) if x}
        coords = basis.coordinates(vec)
        if coords is not None:
            # a^k = sum coords[j] a^j
            poly = [-coords.get(j, Fraction(0)) for j in range(k)] + [Fraction(1)]
            return poly
        basis.add(vec)
        power = mat_mul(power, a)
        k += 1
