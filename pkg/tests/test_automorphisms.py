import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import polys, random_poly
from lndkit.automorphisms import (
    PolyEndo,
    ProbeStatus,
    algebraicity_probe,
    compose,
    exp_derivation,
    group_commutator,
    h_operator,
)
from lndkit.derivations import Derivation, lie_bracket
from lndkit.errors import CapTooSmallError, NonInvertibleError, NotExponentiableError, PreconditionError
from lndkit.parse import parse_poly
from lndkit.poly import MultiPoly, TruncContext

D = Derivation.parse
x, y = MultiPoly.generators(2)


def model_g(d: int) -> PolyEndo:
    return compose(exp_derivation(D(f"[x2^{d}, 0]")), exp_derivation(D(f"[0, x1^{d}]")))


class TestExp:
    def test_shear(self):
        assert exp_derivation(D("[x2^2, 0]")).images == (x + y ** 2, y)

    def test_zero_time_is_identity(self):
        assert exp_derivation(D("[x1, 0]"), 0).is_identity()

    def test_semisimple_not_exponentiable(self):
        with pytest.raises(NotExponentiableError) as info:
            exp_derivation(D("[x1, 0]"))
        assert info.value.code == "NOT_EXPONENTIABLE"

    def test_truncated_mode(self):
        ctx = TruncContext(6)
        d = D("[x2^2, x1^2]")
        e = exp_derivation(d, 1, ctx)
        assert e.cap == 6
        # exact iterates have order k + 1, so five terms cover everything below the cap
        for i, g in enumerate(MultiPoly.generators(2)):
            total, cur = g, g
            for k in range(1, 6):
                cur = d.apply(cur)
                total = total + cur.scale(Fraction(1, factorial(k)))
            assert e.images[i] == total.with_cap(6)

    def test_exact_inverse(self):
        e = exp_derivation(D("[x2^2, 0]"), Fraction(3, 2))
        assert compose(e, e.inverse()).is_identity()


class TestCompose:
    def test_model_g(self):
        g = model_g(2)
        assert g.images == ((y + x ** 2) ** 2 + x, y + x ** 2)

    def test_identity_is_neutral(self):
        g = model_g(2)
        assert compose(g, PolyEndo.identity(2)) == g
        assert compose(PolyEndo.identity(2), g) == g

    def test_one_parameter_inverse(self):
        d = D("[x2^3, 0]")
        assert compose(exp_derivation(d), exp_derivation(d, -1)).is_identity()

    def test_pullback_order(self):
        # the map scale o translate sends p to 2*(p + 1); its pullback is translate* o scale*
        translate = PolyEndo([x + 1, y])
        scale = PolyEndo([2 * x, y])
        assert compose(scale, translate).images[0] == 2 * x + 2
        assert compose(translate, scale).images[0] == 2 * x + 1


class TestCommutator:
    def test_commuting_flows(self):
        assert group_commutator(exp_derivation(D("[1, 0]")), exp_derivation(D("[0, 1]"))).is_identity()

    def test_shear_pair(self):
        c = group_commutator(exp_derivation(D("[0, 1]")), exp_derivation(D("[x2, 0]")))
        assert not c.is_identity()
        assert c.images == (x - 1, y)

    def test_self(self):
        a = exp_derivation(D("[x2^2, 0]"))
        assert group_commutator(a, a).is_identity()

    def test_needs_inverses(self):
        with pytest.raises(NonInvertibleError):
            group_commutator(PolyEndo([x + y, y]), exp_derivation(D("[1, 0]")))

    def test_commuting_lnds_give_commuting_exponentials(self):
        corpus = [D(t) for t in ("[1, 0]", "[x2, 0]", "[x2^2, 0]", "[0, 1]", "[0, x1]", "[x2, 0]")]
        for a in corpus:
            for b in corpus:
                if lie_bracket(a, b).is_zero():
                    assert group_commutator(exp_derivation(a), exp_derivation(b)).is_identity()


class TestH:
    def test_h_on_x(self):
        h = h_operator(model_g(2), x)
        assert h == (y + x ** 2) ** 2
        assert h.lhc() == y ** 2

    def test_h_on_xy(self):
        assert h_operator(model_g(2), x * y).lhc() == y ** 3 + x ** 3

    def test_identity(self):
        assert h_operator(PolyEndo.identity(2), parse_poly("x1^3 - x2", 2)).is_zero()


class TestProbe:
    def test_model_d2(self):
        r = algebraicity_probe(model_g(2), x, 5, TruncContext(12))
        assert r.lhc_degrees == (1, 2, 3, 4, 5, 6)
        assert r.status is ProbeStatus.NON_ALGEBRAIC
        assert r.progression_step == 1
        assert all(a < b for a, b in zip(r.dims, r.dims[1:]))

    def test_model_d3(self):
        r = algebraicity_probe(model_g(3), x, 4, TruncContext(12))
        assert r.lhc_degrees == (1, 3, 5, 7, 9)

    def test_translation(self):
        r = algebraicity_probe(exp_derivation(D("[1, 0]")), x, 5, TruncContext(12))
        assert r.status is ProbeStatus.ALGEBRAIC_BEHAVIOR
        assert r.dims[:3] == (1, 2, 2)

    def test_positive_lhc_coefficients(self):
        g = model_g(2)
        cur = x
        for _ in range(5):
            cur = h_operator(PolyEndo(g.images, 12), cur)
            assert all(c > 0 and c.denominator == 1 for c in cur.lhc().terms.values())

    def test_cap_too_small(self):
        with pytest.raises(CapTooSmallError) as info:
            algebraicity_probe(model_g(2), x, 8, TruncContext(5))
        assert info.value.code == "CAP_TOO_SMALL"

    def test_zero_seed(self):
        with pytest.raises(PreconditionError):
            algebraicity_probe(model_g(2), MultiPoly.zero(2), 3, TruncContext(8))


# properties


times = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@given(times, times)
def test_one_parameter_group(t, s):
    d = D("[x2^2 + x3, x3, 0]")
    assert compose(exp_derivation(d, t), exp_derivation(d, s)) == exp_derivation(d, t + s)


@given(polys(max_degree=3), polys(max_degree=3))
def test_pullback_is_multiplicative(p, q):
    g = model_g(2)
    assert g.pullback(p * q) == g.pullback(p) * g.pullback(q)
    gt = PolyEndo(g.images, 7)
    p0 = p - p.constant_term()
    q0 = q - q.constant_term()
    assert gt.pullback(p0 * q0) == gt.pullback(p0).mul(gt.pullback(q0), TruncContext(7))


def test_lhc_law_on_monomials():
    for d in (2, 3):
        g = model_g(d)
        for a1 in range(5):
            for a2 in range(5 - a1):
                if a1 + a2 == 0:
                    continue
                expected = MultiPoly.zero(2)
                if a1:
                    expected = expected + MultiPoly.monomial((a1 - 1, d + a2), a1)
                if a2:
                    expected = expected + MultiPoly.monomial((d + a1, a2 - 1), a2)
                assert h_operator(g, MultiPoly.monomial((a1, a2))).lhc() == expected


def test_truncated_exp_agrees_with_exact_on_lnd():
    rng = random.Random(2)
    d = D("[x2^2, 0]")
    exact = exp_derivation(d)
    trunc = PolyEndo(exp_derivation(d, 1, TruncContext(9)).images, 9)
    for _ in range(10):
        p = random_poly(rng, 2, 4, min_degree=1)
        assert trunc.pullback(p) == exact.pullback(p).with_cap(9)
