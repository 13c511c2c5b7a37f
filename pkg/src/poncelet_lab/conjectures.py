"""Coaxial-pencil scans and stationary power points for generic pairs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .centers import circle_params, is_right
from .engine import FamilyHandle, family_vertices
from .exceptions import NoMinimum
from .geometry import PlanePoint, SignedCircle, as_complex
from .invariants import InvarianceReport, relspread

FLAT_TOL = 1e-12
SIMPLEX_DIAMETER = 1e-10


def pencil_member(c1: SignedCircle, c2: SignedCircle, t: float) -> SignedCircle:
    """(1 - t) c1 + t c2 on the (D, E, F) coefficient vectors."""
    D1, E1, F1 = c1.coeffs
    D2, E2, F2 = c2.coeffs
    return SignedCircle.from_coeffs((1 - t) * D1 + t * D2, (1 - t) * E1 + t * E2,
                                    (1 - t) * F1 + t * F2, signed=True)


def circle_coeff_rows(h: FamilyHandle, kind: str, n: int) -> np.ndarray:
    """(m, 3) array of (D, E, F) per valid sample of circle ``kind``."""
    V = family_vertices(h, n)
    if kind == "tangential":
        V = V[~is_right(V, 1e-9)]
    c, r2 = circle_params(V, kind)
    return np.column_stack([-2 * c.real, -2 * c.imag, np.abs(c) ** 2 - r2])


def pencil_coeff_rows(h: FamilyHandle, t: float, n: int,
                      kinds=("circumcircle", "euler")) -> np.ndarray:
    C1 = circle_coeff_rows(h, kinds[0], n)
    C2 = circle_coeff_rows(h, kinds[1], n)
    return (1 - t) * C1 + t * C2


def powers_from_coeffs(C: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Powers of points P (k, 2) against circles C (m, 3); shape (k, m)."""
    x, y = P[:, :1], P[:, 1:2]
    return x * x + y * y + x * C[:, 0] + y * C[:, 1] + C[:, 2]


def pencil_invariance_scan(h: FamilyHandle, ts=(0.0, 0.5, 2 / 3, 1.0, 2.0, -1.0),
                           n: int = 256, threshold: float = 1e-7, base=0j) -> list:
    z = as_complex(base)
    P = np.array([[z.real, z.imag]])
    C1 = circle_coeff_rows(h, "circumcircle", n)
    C2 = circle_coeff_rows(h, "euler", n)
    out = []
    for t in ts:
        vals = powers_from_coeffs((1 - t) * C1 + t * C2, P)[0]
        out.append(InvarianceReport(f"pencil[t={t:.6g}]", n, int(np.isfinite(vals).sum()),
                                    float(vals.mean()), relspread(vals), threshold))
    return out


def _relspread_rows(V: np.ndarray) -> np.ndarray:
    """Row-wise relspread of a (k, m) array."""
    spread = V.max(axis=1) - V.min(axis=1)
    return spread / np.maximum(np.abs(V.mean(axis=1)), 1e-9)


class StationaryPowerPoint(BaseEstimator, TransformerMixin):
    """Point whose power against a family of circles varies least.

    ``fit`` takes an ``(m, 3)`` array of circle coefficients ``(D, E, F)``
    (one row per family sample) and minimizes the relspread of the power
    over the plane: a coarse grid first, then Nelder-Mead from the grid
    argmin.  ``transform`` returns the powers of given points.

    Parameters
    ----------
    bounds : tuple (xmin, xmax, ymin, ymax) or None
        Grid extent; defaults to the bounding box of the circle centers.
    grid_n : int, default=64
    refine : bool, default=True
    simplex_scale : float or None
        Initial simplex size; default 1% of the larger half-extent.
    """

    def __init__(self, bounds=None, grid_n: int = 64, refine: bool = True,
                 simplex_scale: Optional[float] = None):
        self.bounds = bounds
        self.grid_n = grid_n
        self.refine = refine
        self.simplex_scale = simplex_scale

    def _objective(self, C):
        def f(xy):
            return float(_relspread_rows(powers_from_coeffs(C, np.atleast_2d(xy)))[0])
        return f

    def fit(self, X, y=None):
        C = check_array(X, ensure_min_samples=2)
        if C.shape[1] != 3:
            raise ValueError("expected (m, 3) circle coefficients")
        if self.bounds is None:
            cx, cy = -C[:, 0] / 2, -C[:, 1] / 2
            pad = 0.5 * max(np.ptp(cx), np.ptp(cy), 1.0)
            bounds = (cx.min() - pad, cx.max() + pad, cy.min() - pad, cy.max() + pad)
        else:
            bounds = tuple(map(float, self.bounds))
        xs = np.linspace(bounds[0], bounds[1], self.grid_n)
        ys = np.linspace(bounds[2], bounds[3], self.grid_n)
        GX, GY = np.meshgrid(xs, ys)
        pts = np.column_stack([GX.ravel(), GY.ravel()])
        field_ = _relspread_rows(powers_from_coeffs(C, pts)).reshape(GX.shape)
        self.coeffs_ = C
        self.grid_ = (xs, ys, field_)
        obj = self._objective(C)
        self.relspread_at_origin_ = obj(np.zeros(2))
        if np.nanmax(field_) < FLAT_TOL:
            self.point_ = PlanePoint(0.0, 0.0)
            self.relspread_ = self.relspread_at_origin_
            self.history_ = [self.relspread_]
            raise NoMinimum("variance field is flat: every grid point is stationary")
        k = int(np.nanargmin(field_))
        x0 = pts[k]
        best = float(field_.ravel()[k])
        history = [best]
        if self.refine:
            scale = self.simplex_scale or 0.01 * max(bounds[1] - bounds[0], bounds[3] - bounds[2]) / 2
            for _ in range(8):
                simplex = np.array([x0, x0 + [scale, 0], x0 + [0, scale]])
                res = minimize(obj, x0, method="Nelder-Mead",
                               callback=lambda xk: history.append(obj(xk)),
                               options={"initial_simplex": simplex, "xatol": SIMPLEX_DIAMETER,
                                        "fatol": 0.0, "maxiter": 4000})
                moved = np.linalg.norm(res.x - x0)
                if res.fun <= best:
                    x0, best = res.x, float(res.fun)
                if moved < SIMPLEX_DIAMETER:
                    break
                scale = max(moved, 1e-6)
        self.point_ = PlanePoint(float(x0[0]), float(x0[1]))
        self.relspread_ = best
        self.history_ = history
        return self

    def transform(self, X):
        """Powers of the points ``X`` (k, 2) against the fitted circles.

        Returns an array of shape (k, m).
        """
        check_is_fitted(self, "coeffs_")
        return powers_from_coeffs(self.coeffs_, check_array(X))


@dataclass
class StationaryPointResult:
    point: PlanePoint
    relspread_at_point: float
    relspread_at_O: float
    kind: str
    grid: tuple = field(repr=False, default=None)
    history: list = field(repr=False, default_factory=list)
    flat: bool = False

    def to_dict(self) -> dict:
        return {"kind": self.kind, "point": list(self.point),
                "relspread_at_point": self.relspread_at_point,
                "relspread_at_O": self.relspread_at_O, "flat": self.flat}


def stationary_power_point(h: FamilyHandle, kind: str = "circumcircle", grid_n: int = 64,
                           refine: bool = True, n: int = 128) -> StationaryPointResult:
    """Grid plus Nelder-Mead search for the point of least power variation."""
    if kind not in ("circumcircle", "euler"):
        raise ValueError("kind must be 'circumcircle' or 'euler'")
    C = circle_coeff_rows(h, kind, n)
    a, b = h.pair.outer.a, h.pair.outer.b
    est = StationaryPowerPoint(bounds=(-a, a, -b, b), grid_n=grid_n, refine=refine,
                               simplex_scale=0.01 * a)
    est.fit(C)
    return StationaryPointResult(est.point_, est.relspread_, est.relspread_at_origin_, kind,
                                 est.grid_, est.history_)


def variance_rows(result: StationaryPointResult):
    xs, ys, F = result.grid
    return [(x, y, F[j, i]) for j, y in enumerate(ys) for i, x in enumerate(xs)]
