"""Hermitian distance critical points of unitarily invariant matrix varieties.

Critical points of ``||X - Y||^2`` on a variety cut out by conditions on
singular values are computed on a real diagonal slice and lifted back through
the SVD of ``Y``.
"""
from ._backend import COMPILED
from .chambers import Grid, chamber_scan, classify_point, predicted_count
from .cxmat import hermitian_inner, q_inner, random_unitary, realify, svd, unrealify
from .errors import (
    DegenerateSpectrum,
    HDSliceError,
    NonGenericData,
    ParseError,
    RankTooSmall,
    ShapeMismatch,
    SolverFailure,
    VerificationFailure,
)
from .lift import eckart_young, hd_poly, lift_critical, sim_decomposition_check
from .rpoly import BiPoly, RPoly, real_roots, sturm_chain, sturm_count
from .slices import (
    AllOnes,
    AxisUnion,
    DetMagOne,
    FermatSphere,
    ParabolaPair,
    PlaneCurve,
    RankAtMost,
    ed_critical,
    family_from_json,
    genericity_check,
)
from .verify import brute_force_hd, check_splitting, is_hd_critical, tangent_frame

__version__ = "0.1.0"

__all__ = [
    "COMPILED", "Grid", "chamber_scan", "classify_point", "predicted_count",
    "hermitian_inner", "q_inner", "random_unitary", "realify", "svd", "unrealify",
    "DegenerateSpectrum", "HDSliceError", "NonGenericData", "ParseError", "RankTooSmall",
    "ShapeMismatch", "SolverFailure", "VerificationFailure",
    "eckart_young", "hd_poly", "lift_critical", "sim_decomposition_check",
    "BiPoly", "RPoly", "real_roots", "sturm_chain", "sturm_count",
    "AllOnes", "AxisUnion", "DetMagOne", "FermatSphere", "ParabolaPair", "PlaneCurve",
    "RankAtMost", "ed_critical", "family_from_json", "genericity_check",
    "brute_force_hd", "check_splitting", "is_hd_critical", "tangent_frame",
    "__version__",
]
