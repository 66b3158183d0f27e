"""Counterexample pipelines on the model pair d/dx1, d/dx2 of Q[x1, x2].

With f1 = x2^d and f2 = x1^d the derivation f1*d/dx1 + f2*d/dx2 is a sum of
two LNDs that is not locally finite, and exp(f1 d/dx1) o exp(f2 d/dx2) is a
unipotent automorphism whose h = g* - id raises degrees without bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .automorphisms import CONVENTION, PROBE_FOOTNOTE, PolyEndo, algebraicity_probe, compose, exp_derivation
from .derivations import Derivation, EquivalenceStatus, equivalent, growth_certificate
from .errors import CapTooSmallError, PreconditionError
from .poly import MultiPoly, TruncContext


class SectionVerdict(str, Enum):
    VERIFIED = "VERIFIED"
    FAILED = "FAILED"


@dataclass(frozen=True)
class CertificateSection:
    name: str
    verdict: SectionVerdict
    witness: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.verdict is SectionVerdict.VERIFIED


@dataclass(frozen=True)
class ModelPair:
    d: int
    d1: Derivation
    d2: Derivation
    f1: MultiPoly
    f2: MultiPoly
    derivation: Derivation
    checks: dict

    @property
    def valid(self) -> bool:
        return all(self.checks.values())


def build_model_pair(d: int, nvars: int = 2) -> ModelPair:
    """d/dx1, d/dx2, x2^d, x1^d and the sum x2^d d/dx1 + x1^d d/dx2."""
    if d < 2:
        raise PreconditionError(f"model pair needs d >= 2, got {d}")
    if nvars < 2:
        raise PreconditionError("model pair needs at least two variables")
    x1, x2 = MultiPoly.variable(nvars, 1), MultiPoly.variable(nvars, 2)
    d1, d2 = Derivation.partial(nvars, 1), Derivation.partial(nvars, 2)
    f1, f2 = x2 ** d, x1 ** d
    delta = d1.times(f1) + d2.times(f2)
    expected_low = Derivation([x2 ** d, x1 ** d] + [MultiPoly.zero(nvars)] * (nvars - 2))
    checks = {
        "f1_in_ker_d1": not d1.apply(f1),
        "f2_in_ker_d2": not d2.apply(f2),
        "lowest_component": delta.lowest_component() == (d - 1, expected_low),
        "not_equivalent": equivalent(d1, d2).status is EquivalenceStatus.NOT_EQUIVALENT,
    }
    return ModelPair(d, d1, d2, f1, f2, delta, checks)


def kernel_lift(delta: Derivation, g0: MultiPoly, cap: int) -> MultiPoly:
    """The element g of ker(delta) with g(0, x2, ..., xn) = g0, modulo high degrees.

    ``delta`` must have lowest component d/dx1.  Homogeneous parts are built
    one degree at a time: the x1-free part of g_(k+1) comes from g0 and the
    rest is the x1-antiderivative of -(delta(g_(0) + ... + g_(k)))_(k).
    Terms through degree ``cap`` are produced (the result carries cap + 1),
    which is what makes delta(g) vanish below degree ``cap``.
    """
    n = delta.nvars
    if g0.nvars != n:
        raise PreconditionError("g0 and the derivation live in different rings")
    if 1 in g0.variables():
        raise PreconditionError("g0 must not involve x1")
    if delta.is_zero() or delta.lowest_component() != (-1, Derivation.partial(n, 1)):
        raise PreconditionError("lowest homogeneous component of the derivation must be d/dx1")
    ctx = TruncContext(cap + 1)
    g0 = g0.exact()
    g = g0.component(0)
    acc = delta.apply(g, ctx)
    for k in range(cap):
        part = g0.component(k + 1) - acc.component(k).exact().integrate(1)
        part = part.exact()
        if part:
            g = g + part
            acc = acc.add(delta.apply(part, ctx), ctx)
    return g.with_cap(cap + 1)


def _lhc_positive(p: MultiPoly) -> bool:
    coefs = list(p.lhc().terms.values())
    return all(c >= 0 and c.denominator == 1 for c in coefs) and sum(coefs) > 0


def certify_not_locally_finite(delta: Derivation, seed: MultiPoly, K: int, step: int | None = None) -> CertificateSection:
    """Check ord(delta^(k-1)(seed)) = ord(seed) + (k-1)*step for k = 1..K.

    ``step`` defaults to the degree of the lowest component of ``delta``
    (d - 1 on the model pair), or 1 when that degree is not positive.  Each
    rung also needs a lowest component with nonnegative integer
    coefficients of positive sum.
    """
    if K < 2:
        raise PreconditionError("need at least two rungs")
    if not seed:
        raise PreconditionError("seed must be nonzero")
    if step is None:
        e = delta.lowest_component()[0] if not delta.is_zero() else 0
        step = e if e >= 1 else 1
    start = seed.order()
    orders = []
    cur = seed
    for k in range(1, K + 1):
        if k > 1:
            cur = delta.apply(cur)
        o = cur.order()
        orders.append(o)
        expected = start + (k - 1) * step
        if o != expected or not _lhc_positive(cur):
            return CertificateSection(
                "not_locally_finite",
                SectionVerdict.FAILED,
                {"k": k, "ord": o, "expected": expected, "orders": orders, "step": step},
            )
    cert = growth_certificate(delta, seed, min_step=1)
    return CertificateSection(
        "not_locally_finite",
        SectionVerdict.VERIFIED,
        {"orders": orders, "step": step, "K": K,
         "unbounded": cert is not None and cert.step == step},
    )


def certify_non_algebraic_for(g: PolyEndo, seed: MultiPoly, budget: int, cap: int, step: int) -> CertificateSection:
    """Probe g and require deg LHC(h^i(seed)) = ord(seed) + i*step and growing Krylov dimension."""
    report = algebraicity_probe(g, seed, budget, TruncContext(cap))
    expected = [seed.order() + i * step for i in range(budget + 1)]
    dims_grow = all(a < b for a, b in zip(report.dims, report.dims[1:]))
    ok = list(report.lhc_degrees) == expected and dims_grow
    return CertificateSection(
        "non_algebraic",
        SectionVerdict.VERIFIED if ok else SectionVerdict.FAILED,
        {
            "lhc_degrees": list(report.lhc_degrees),
            "expected": expected,
            "dims": list(report.dims),
            "probe_status": report.status.value,
            "budget": budget,
            "cap": cap,
            "convention": CONVENTION,
            "footnote": PROBE_FOOTNOTE,
        },
    )


def model_automorphism(d: int) -> PolyEndo:
    pair = build_model_pair(d)
    return compose(exp_derivation(pair.d1.times(pair.f1)), exp_derivation(pair.d2.times(pair.f2)))


def certify_non_algebraic(d: int, budget: int, cap: int) -> CertificateSection:
    """Non-algebraicity evidence for exp(x2^d d/dx1) o exp(x1^d d/dx2), seeded at x1."""
    if d < 2:
        raise PreconditionError(f"model pair needs d >= 2, got {d}")
    if 1 + budget * (d - 1) >= cap:
        raise CapTooSmallError(f"need 1 + budget*(d-1) = {1 + budget * (d - 1)} < cap = {cap}")
    g = model_automorphism(d)
    return certify_non_algebraic_for(g, MultiPoly.variable(2, 1), budget, cap, d - 1)
