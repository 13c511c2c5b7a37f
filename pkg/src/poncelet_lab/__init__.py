"""Numerical laboratory for Poncelet triangle families in ellipse pairs."""
from .centers import CenterSpec, center_X, circle_params, derived_triangle, named_circle
from .conjectures import (
    StationaryPowerPoint,
    pencil_invariance_scan,
    pencil_member,
    stationary_power_point,
)
from .engine import (
    FamilyHandle,
    PairSpec,
    build_named_pair,
    closure_check,
    family_vertices,
    generic_pair,
    handle_from_pair,
    normalize_pair,
    sample_family,
)
from .geometry import ConicCoeffs, EllipseSpec, PlanePoint, SignedCircle, conic_classify, power
from .invariants import InvarianceReport, power_series, relspread, table4_suite, verify_invariant
from .loci import ConicFitter, fit_conic, lemma_ellipse, predicted_locus, sample_locus

__version__ = "0.1.0"

__all__ = [
    "CenterSpec", "ConicCoeffs", "ConicFitter", "EllipseSpec", "FamilyHandle",
    "InvarianceReport", "PairSpec", "PlanePoint", "SignedCircle", "StationaryPowerPoint",
    "build_named_pair", "center_X", "circle_params", "closure_check", "conic_classify",
    "derived_triangle", "family_vertices", "fit_conic", "generic_pair", "handle_from_pair",
    "lemma_ellipse", "named_circle", "normalize_pair", "pencil_invariance_scan", "pencil_member",
    "power", "power_series", "predicted_locus", "relspread", "sample_family", "sample_locus",
    "stationary_power_point", "table4_suite", "verify_invariant",
]
