"""Loci of triangle centers over a family, conic fitting and predicted loci."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .centers import CenterSpec, is_right
from .engine import FamilyHandle, family_lambdas, family_vertices
from .exceptions import DegenerateLocus, RankDeficient
from .geometry import (
    ConicClass,
    ConicCoeffs,
    EllipseSpec,
    PlanePoint,
    conic_classify,
    normalize_angle,
)
from .invariants import shear_frame

STATIONARY_DIAMETER = 1e-9


def sample_locus(h: FamilyHandle, center: CenterSpec, n: int = 512) -> np.ndarray:
    """Complex locus points on the lam_k grid; NaN where the center is undefined."""
    V = family_vertices(h, n)
    out = np.full(n, np.nan + 0j)
    ok = np.ones(n, dtype=bool)
    if center.kimberling == 26:
        ok = ~is_right(V, 1e-9)
    out[ok] = center(V[ok])
    return out


def locus_rows(h: FamilyHandle, points: np.ndarray):
    """Rows (k, Re lam, Im lam, x, y) for CSV export."""
    lams = family_lambdas(len(points))
    return [(k, l.real, l.imag, z.real, z.imag) for k, (l, z) in enumerate(zip(lams, points))]


def is_stationary(points) -> bool:
    z = np.asarray(points)
    z = z[np.isfinite(z)]
    return bool(np.max(np.abs(z - z.mean())) * 2 < STATIONARY_DIAMETER)


def _as_xy(X):
    X = np.asarray(X)
    if np.iscomplexobj(X):
        X = X[np.isfinite(X)]
        X = np.column_stack([X.real, X.imag])
    return check_array(X, ensure_min_samples=6)


class ConicFitter(BaseEstimator):
    """Algebraic least-squares conic through 2-D points.

    The coefficient vector is the right singular vector of the design matrix
    ``[x^2, xy, y^2, x, y, 1]`` with the smallest singular value; no
    ellipse-specific constraint is imposed.

    Parameters
    ----------
    center : bool, default=True
        Shift and scale the points to unit RMS radius before fitting, and
        map the coefficients back afterwards.
    rank_tol : float, default=1e-9
        Relative gap below which the two smallest singular values are
        considered tied (the points do not pin down a single conic).

    Attributes
    ----------
    coeffs_ : ConicCoeffs
    classification_ : ConicClass
    rms_residual_ : float
        RMS algebraic residual of the unit-norm conic on the input points.
    """

    def __init__(self, center: bool = True, rank_tol: float = 1e-9):
        self.center = center
        self.rank_tol = rank_tol

    def fit(self, X, y=None):
        X = _as_xy(X)
        x, yy = X[:, 0], X[:, 1]
        if self.center:
            mx, my = x.mean(), yy.mean()
            sc = math.sqrt(np.mean((x - mx) ** 2 + (yy - my) ** 2))
        else:
            mx, my, sc = 0.0, 0.0, 1.0
        if sc == 0:
            raise RankDeficient("all points coincide")
        u, v = (x - mx) / sc, (yy - my) / sc
        D = np.column_stack([u * u, u * v, v * v, u, v, np.ones_like(u)])
        _, sv, Vt = np.linalg.svd(D, full_matrices=False)
        if sv[-2] <= self.rank_tol * sv[0]:
            raise RankDeficient("design matrix has a null space of dimension > 1")
        A, B, C, Dd, E, F = Vt[-1]
        # undo u = (x - mx)/sc, v = (y - my)/sc
        A, B, C = A / sc**2, B / sc**2, C / sc**2
        Dd, E = Dd / sc, E / sc
        D2 = Dd - 2 * A * mx - B * my
        E2 = E - 2 * C * my - B * mx
        F2 = F + A * mx * mx + B * mx * my + C * my * my - Dd * mx - E * my
        self.coeffs_ = ConicCoeffs.from_raw(A, B, C, D2, E2, F2)
        self.classification_ = conic_classify(self.coeffs_)
        self.rms_residual_ = float(np.sqrt(np.mean(self.coeffs_(x, yy) ** 2)))
        self.n_samples_ = X.shape[0]
        return self

    def decision_function(self, X):
        """Algebraic value of the fitted unit-norm conic at each point."""
        check_is_fitted(self, "coeffs_")
        X = _as_xy(X) if len(X) >= 6 else check_array(X)
        return self.coeffs_(X[:, 0], X[:, 1])

    def score(self, X, y=None):
        return -float(np.sqrt(np.mean(self.decision_function(X) ** 2)))

    @property
    def ellipse_(self) -> Optional[EllipseSpec]:
        check_is_fitted(self, "coeffs_")
        return self.classification_.ellipse


@dataclass(frozen=True)
class ConicFit:
    coeffs: ConicCoeffs
    classification: ConicClass
    rms_residual: float

    @property
    def ellipse(self) -> Optional[EllipseSpec]:
        return self.classification.ellipse

    @property
    def kind(self) -> str:
        return self.classification.kind


def fit_conic(points) -> ConicFit:
    est = ConicFitter().fit(points)
    return ConicFit(est.coeffs_, est.classification_, est.rms_residual_)


def lemma_ellipse(u: complex, v: complex, w: complex) -> EllipseSpec:
    """Image of the unit circle under lam -> u lam + v / lam + w."""
    au, av = abs(u), abs(v)
    major, minor = au + av, abs(au - av)
    if au == 0 or av == 0:
        theta = 0.0
    else:
        theta = normalize_angle((math.atan2(u.imag, u.real) + math.atan2(v.imag, v.real)) / 2)
    if minor < 1e-12:
        raise DegenerateLocus("locus is a segment", center=complex(w), half_length=major, theta=theta)
    return EllipseSpec(PlanePoint.of(w), major, minor, theta)


@dataclass(frozen=True)
class PredictedLocus:
    u: complex
    v: complex
    w: complex
    w0: Optional[complex] = None
    w1: Optional[complex] = None

    @property
    def ellipse(self) -> EllipseSpec:
        return lemma_ellipse(self.u, self.v, self.w)

    def __call__(self, lam):
        lam = np.asarray(lam)
        return self.u * lam + self.v / lam + self.w


def predicted_locus(h: FamilyHandle, alpha: complex, beta: complex) -> PredictedLocus:
    """Closed-form u, v, w of the locus of alpha X2 + beta X3."""
    p, q, f, g = h.p, h.q, h.f, h.g
    if p - q == 0 or p + q == 0:
        raise ValueError("outer ellipse is degenerate")
    al, be = complex(alpha), complex(beta)
    fc, gc = f.conjugate(), g.conjugate()
    den = 3 * (p - q) * (p + q)
    u = p * (fc * gc * (al * p * p - q * q * (al + 3 * be)) + 3 * be * p * q) / den
    v = be * p * q * (q - f * g * p) / ((q - p) * (p + q)) + al * f * g * q / 3
    w = (q * (fc + gc) * (p * p * (al + 3 * be) - al * q * q)
         + p * (f + g) * (al * p * p - q * q * (al + 3 * be))) / den
    w0 = (q * (fc + gc) + p * (f + g)) / 3
    w1 = (q * (2 * p * p + q * q) * (fc + gc) - p * (f + g) * (p * p + 2 * q * q)) / den
    return PredictedLocus(u, v, w, w0, w1)


def circular_loci_circumpair(h: FamilyHandle, gammas=(0.0, -2.0, -0.5, 4.0)) -> list:
    """(center, radius) of the circular locus of (1 - gamma) X2 + gamma X3."""
    if abs(h.q) > 1e-12:
        raise ValueError("the outer ellipse must be a circle")
    s, r = h.f + h.g, abs(h.f * h.g)
    out = [((1 - gm) * s / 3 * h.p, abs(1 - gm) * r / 3 * h.p) for gm in gammas]
    centers = [c for c, _ in out if abs(c) > 0]
    if centers:
        ref = centers[0] / abs(centers[0])
        assert all(abs((c * ref.conjugate()).imag) < 1e-9 for c in centers)
    return out


@dataclass(frozen=True)
class AcutenessProfile:
    has_obtuse: bool
    x3_outside_caustic: bool


def acuteness_profile(h: FamilyHandle, n: int = 512) -> AcutenessProfile:
    if abs(h.q) > 1e-12:
        raise ValueError("the outer ellipse must be a circle")
    V = family_vertices(h, n)
    d1, d2 = np.roll(V, -1, axis=-1) - V, np.roll(V, -2, axis=-1) - V
    cosv = (d1 * np.conj(d2)).real / (np.abs(d1) * np.abs(d2))
    obtuse = bool(np.any(cosv < -math.sin(1e-9)))
    outside = bool(h.pair.inner.level(0j) > 0)
    return AcutenessProfile(obtuse, outside)


@dataclass(frozen=True)
class TiltedLociFormula:
    """Closed-form loci of X3 and X5 in the frame where the caustic is axis-aligned.

    ``frame_angle`` rotates that frame back to the pair's frame.
    """

    ellipse3: Optional[ConicCoeffs]
    aspect3: float
    a5: float
    b5: float
    frame_angle: float
    shear: tuple

    def to_frame(self, z):
        """Rotate pair-frame points into the caustic-aligned frame."""
        return np.asarray(z) * complex(math.cos(self.frame_angle), -math.sin(self.frame_angle))


def tilted_loci_formula(h: FamilyHandle) -> TiltedLociFormula:
    if not h.pair.is_concentric:
        raise ValueError("the pair must be concentric")
    a, b, c, ac, bc = shear_frame(h.pair)
    K = (ac * ac - bc * bc + b * b) ** 2 * a * a - 4 * ac * ac * b * b * (ac - bc) ** 2
    quad = 4 * b * b * ac * ac
    try:
        e3 = ConicCoeffs.from_raw(quad * ac * ac, 0.0, quad * bc * bc, 0.0, 0.0, -bc * bc * K)
    except Exception:
        e3 = None
    r2 = math.sqrt(2)
    a5 = r2 * (a * ac * ac * bc + a * b * b * bc - a * bc**3 - 2 * ac**3 * b - 2 * ac * b * bc * bc) / (8 * ac * ac * b)
    b5 = r2 * (a * ac * ac - 4 * ac * b * bc + a * (b * b - bc * bc)) / (8 * b * ac)
    return TiltedLociFormula(e3, bc / ac, a5, b5, h.pair.inner.theta, (a, b, c))


def axis_aligned_e5(a: float, b: float, ac: float) -> tuple[float, float]:
    """Semi-axes (x, y) of the X5 locus for an axis-aligned concentric pair."""
    return (abs(a**3 - 3 * a * a * ac + a * b * b - ac * b * b) / (4 * a * a),
            abs(a * a * ac - 2 * a * b * b + 3 * ac * b * b) / (4 * a * b))


def ellipse_distance(e1: EllipseSpec, e2: EllipseSpec, round_tol: float = 1e-4) -> dict:
    """Center, semi-axis and rotation discrepancies; rotation is mod pi and
    skipped (NaN) when either ellipse is near-circular."""
    dc = abs(e1.center.z - e2.center.z)
    da = max(abs(e1.a - e2.a), abs(e1.b - e2.b))
    if (e1.a - e1.b) / e1.a < round_tol or (e2.a - e2.b) / e2.a < round_tol:
        dt = float("nan")
    else:
        d = (e1.theta - e2.theta) % math.pi
        dt = min(d, math.pi - d)
    return {"center": dc, "axes": da, "rotation": dt}


def _xy_semi_axes(e: EllipseSpec) -> tuple[float, float]:
    """Semi-axes along x and y of an (almost) axis-aligned ellipse."""
    return (e.a, e.b) if abs(math.cos(e.theta)) >= math.sqrt(0.5) else (e.b, e.a)


def tilted_loci_report(h: FamilyHandle, n: int = 512) -> dict:
    """Closed-form X3/X5 locus data next to conic fits, in the caustic-aligned frame.

    Keys ending in ``_fit`` come from sampling; ``*_formula`` from the
    closed forms. ``aspect3`` and ``x3_rotation`` are the properties that
    hold; the closed-form ellipse and semi-axes are compared, not asserted.
    """
    pr = tilted_loci_formula(h)
    out = {"aspect3_formula": pr.aspect3, "a5_formula": pr.a5, "b5_formula": pr.b5}
    if pr.ellipse3 is not None:
        cls = conic_classify(pr.ellipse3)
        out["e3_formula"] = _xy_semi_axes(cls.ellipse) if cls.ellipse is not None else cls.kind
    for k in (3, 5):
        pts = pr.to_frame(sample_locus(h, CenterSpec.X(k), n))
        if is_stationary(pts):
            out[f"e{k}_fit"] = (0.0, 0.0)
            continue
        e = fit_conic(pts).ellipse
        out[f"e{k}_fit"] = _xy_semi_axes(e)
        if k == 3:
            d = e.theta % (math.pi / 2)
            out["x3_rotation"] = min(d, math.pi / 2 - d)
    fx, fy = out["e3_fit"]
    out["aspect3_fit"] = fx / fy if fy else float("nan")
    px, py = out["e5_fit"]
    out["e5_discrepancy"] = max(abs(px - pr.a5), abs(py - pr.b5))
    if isinstance(out.get("e3_formula"), tuple):
        ex, ey = out["e3_formula"]
        out["e3_discrepancy"] = max(abs(ex - fx), abs(ey - fy))
    return out
