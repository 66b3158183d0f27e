import random

import pytest

from conftest import random_poly
from lndkit.certify import (
    SectionVerdict,
    build_model_pair,
    certify_non_algebraic,
    certify_not_locally_finite,
    kernel_lift,
)
from lndkit.derivations import Derivation
from lndkit.errors import CapTooSmallError, PreconditionError
from lndkit.parse import parse_poly
from lndkit.poly import MultiPoly, TruncContext

D = Derivation.parse
x, y = MultiPoly.generators(2)
SHEAR = D("[1, x1]")
TWISTED = D("[1, x1 + x1*x2]")


def vanishes_below(p: MultiPoly, cap: int) -> bool:
    return all(sum(m) >= cap for m in p.terms)


class TestModelPair:
    @pytest.mark.parametrize("d", [2, 3])
    def test_construction(self, d):
        m = build_model_pair(d)
        assert m.derivation == D(f"[x2^{d}, x1^{d}]")
        assert m.valid
        assert m.checks["not_equivalent"]

    def test_d_below_two(self):
        with pytest.raises(PreconditionError):
            build_model_pair(1)


class TestKernelLift:
    def test_shear(self):
        g = kernel_lift(SHEAR, y, 8)
        assert g == y - x ** 2 / 2
        assert SHEAR.apply(g.exact()).is_zero()

    def test_constant(self):
        assert kernel_lift(SHEAR, MultiPoly.one(2), 8) == 1

    def test_square_matches_closed_form(self):
        # ker of d/dx1 + x1 d/dx2 is Q[x2 - x1^2/2], so the lift of x2^2 is its square
        g = kernel_lift(SHEAR, y ** 2, 8)
        assert g == (y - x ** 2 / 2) ** 2
        assert g.set_variable_zero(1) == y ** 2

    def test_twisted_matches_series(self):
        # (1 + x2) exp(-x1^2/2) is in the kernel; its x1 = 0 value is 1 + x2
        g = kernel_lift(TWISTED, y, 6)
        series = MultiPoly.zero(2)
        term = MultiPoly.one(2)
        for k in range(4):
            series = series + term
            term = term * (-x ** 2 / 2) / (k + 1)
        assert g == ((1 + y) * series - 1).with_cap(7)

    def test_g0_with_x1_rejected(self):
        with pytest.raises(PreconditionError):
            kernel_lift(SHEAR, x + y, 8)

    def test_wrong_lowest_component_rejected(self):
        with pytest.raises(PreconditionError):
            kernel_lift(D("[x1, 1]"), y, 8)
        with pytest.raises(PreconditionError):
            kernel_lift(D("[0, 1]"), y, 8)

    def test_deterministic_and_multiplicative(self):
        rng = random.Random(4)
        cap = 8
        for _ in range(10):
            a = random_poly(rng, 2, 5).set_variable_zero(1)
            b = random_poly(rng, 2, 5).set_variable_zero(1)
            la, lb = kernel_lift(TWISTED, a, cap), kernel_lift(TWISTED, b, cap)
            assert la == kernel_lift(TWISTED, a, cap)
            assert kernel_lift(TWISTED, a * b, cap).with_cap(cap) == la.mul(lb, TruncContext(cap))
            assert vanishes_below(TWISTED.apply(la.exact()), cap)


class TestLadder:
    def test_d2(self):
        m = build_model_pair(2)
        s = certify_not_locally_finite(m.derivation, x + y, 6)
        assert s.verdict is SectionVerdict.VERIFIED
        assert s.witness["orders"] == [1, 2, 3, 4, 5, 6]
        assert s.witness["unbounded"]

    def test_d3(self):
        s = certify_not_locally_finite(build_model_pair(3).derivation, x + y, 5)
        assert s.witness["orders"] == [1, 3, 5, 7, 9]

    def test_lnd_fails_at_second_rung(self):
        s = certify_not_locally_finite(D("[1, 0]"), x + y, 4)
        assert s.verdict is SectionVerdict.FAILED
        assert s.witness["k"] == 2 and s.witness["ord"] == 0

    def test_needs_two_rungs(self):
        with pytest.raises(PreconditionError):
            certify_not_locally_finite(D("[1, 0]"), x, 1)


class TestNonAlgebraic:
    def test_d2(self):
        s = certify_non_algebraic(2, 5, 12)
        assert s.verdict is SectionVerdict.VERIFIED
        assert s.witness["lhc_degrees"] == [1, 2, 3, 4, 5, 6]

    def test_d3(self):
        s = certify_non_algebraic(3, 4, 14)
        assert s.witness["lhc_degrees"] == [1, 3, 5, 7, 9]

    def test_cap_too_small(self):
        with pytest.raises(CapTooSmallError):
            certify_non_algebraic(3, 5, 11)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pipeline_coherence(d):
    m = build_model_pair(d)
    assert certify_not_locally_finite(m.derivation, x + y, 5).verified
    assert certify_non_algebraic(d, 3, 1 + 3 * (d - 1) + 2).verified


def test_lift_parses_from_text():
    g = kernel_lift(D("[1, x1]"), parse_poly("x2^3", 2), 9)
    assert g == (y - x ** 2 / 2) ** 3
