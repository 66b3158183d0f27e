"""Exact computations with derivations and automorphisms of Q[x1, ..., xn]."""

__version__ = "0.1.0"

from .automorphisms import (
    CONVENTION,
    PolyEndo,
    ProbeReport,
    ProbeStatus,
    algebraicity_probe,
    compose,
    exp_derivation,
    group_commutator,
    h_operator,
)
from .certify import (
    CertificateSection,
    ModelPair,
    SectionVerdict,
    build_model_pair,
    certify_non_algebraic,
    certify_not_locally_finite,
    kernel_lift,
)
from .derivations import (
    Derivation,
    EquivalenceStatus,
    EquivalenceVerdict,
    FinitenessReport,
    FinitenessStatus,
    LndStatus,
    NilpotencyVerdict,
    equivalent,
    growth_certificate,
    is_lnd,
    krylov,
    lie_bracket,
)
from .errors import LndkitError
from .gradings import Grading, check_vertex_lnd, decompose_derivation, decompose_poly, weight_polytope
from .jordan import (
    ad_conjugate,
    invariant_subspace,
    jordan_chevalley,
    jordan_decompose,
    leibniz_spot_check,
    semisimple_shift_check,
)
from .parse import parse_poly, parse_poly_list
from .poly import MultiPoly, OrdAtLeast, TruncContext, format_poly

__all__ = [
    "CONVENTION", "CertificateSection", "Derivation", "EquivalenceStatus", "EquivalenceVerdict",
    "FinitenessReport", "FinitenessStatus", "Grading", "LndStatus", "LndkitError", "ModelPair",
    "MultiPoly", "NilpotencyVerdict", "OrdAtLeast", "PolyEndo", "ProbeReport", "ProbeStatus",
    "SectionVerdict", "TruncContext", "ad_conjugate", "algebraicity_probe", "build_model_pair",
    "certify_non_algebraic", "certify_not_locally_finite", "check_vertex_lnd", "compose",
    "decompose_derivation", "decompose_poly", "equivalent", "exp_derivation", "format_poly",
    "group_commutator", "growth_certificate", "h_operator", "invariant_subspace", "is_lnd",
    "jordan_chevalley", "jordan_decompose", "kernel_lift", "krylov", "leibniz_spot_check",
    "lie_bracket", "parse_poly", "parse_poly_list", "semisimple_shift_check", "weight_polytope",
]
