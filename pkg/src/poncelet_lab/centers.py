"""Triangle centers, derived triangles and named circles.

Triangles are complex arrays of shape ``(..., 3)``; every function
broadcasts over the leading axes.  Side ``s_i`` is opposite vertex ``P_i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DegenerateTriangle, RightTriangle, TangentialUndefined, ZeroMass
from .geometry import PlanePoint, SignedCircle

KIMBERLING = (1, 2, 3, 4, 5, 6, 9, 10, 20, 26, 40, 381, 1158)
DERIVED = ("medial", "excentral", "extouch", "intouch", "orthic",
           "anticomplementary", "euler_triangle", "tangential")
CIRCLES = ("circumcircle", "euler", "steiner_orthoptic", "orthocentroidal", "polar",
           "tangential", "anticomplementary", "bevan", "spieker", "mandart", "incircle")
COAXIAL = ("circumcircle", "euler", "steiner_orthoptic", "orthocentroidal", "polar", "tangential")

AREA_TOL = 1e-14
RIGHT_TOL = 1e-12


def as_triangles(T) -> np.ndarray:
    """Accept complex (..., 3) or real (..., 3, 2) vertex arrays."""
    T = np.asarray(T)
    if np.iscomplexobj(T):
        return T.astype(complex)
    T = T.astype(float)
    if T.shape[-1] == 2 and T.ndim >= 2 and T.shape[-2] == 3:
        return T[..., 0] + 1j * T[..., 1]
    return T.astype(complex)


def signed_area(T) -> np.ndarray:
    T = as_triangles(T)
    d1, d2 = T[..., 1] - T[..., 0], T[..., 2] - T[..., 0]
    return 0.5 * (d1.real * d2.imag - d1.imag * d2.real)


def _check(T):
    T = as_triangles(T)
    if np.any(np.abs(signed_area(T)) < AREA_TOL):
        raise DegenerateTriangle("triangle area below 1e-14")
    return T


def sidelengths(T) -> np.ndarray:
    T = _check(T)
    return np.abs(np.roll(T, -1, axis=-1) - np.roll(T, -2, axis=-1))


def barycentric_point(T, w) -> np.ndarray:
    T = as_triangles(T)
    w = np.asarray(w, dtype=float)
    mass = w.sum(axis=-1)
    if np.any(np.abs(mass) < 1e-300):
        raise ZeroMass("barycentric weights sum to zero")
    return (w * T).sum(axis=-1) / mass


def circumcenter(T) -> np.ndarray:
    """Intersection of perpendicular bisectors, computed relative to P1."""
    T = _check(T)
    w2, w3 = T[..., 1] - T[..., 0], T[..., 2] - T[..., 0]
    d = 2 * (w2.real * w3.imag - w2.imag * w3.real)
    n2, n3 = np.abs(w2) ** 2, np.abs(w3) ** 2
    ux = (n2 * w3.imag - n3 * w2.imag) / d
    uy = (n3 * w2.real - n2 * w3.real) / d
    return T[..., 0] + ux + 1j * uy


def circumcenter_det(T) -> np.ndarray:
    """Complex-determinant circumcenter |v, |v|^2, 1| / |v, conj v, 1|."""
    T = _check(T)
    num = np.linalg.det(np.stack([T, np.abs(T) ** 2 + 0j, np.ones_like(T)], axis=-1))
    den = np.linalg.det(np.stack([T, np.conj(T), np.ones_like(T)], axis=-1))
    return num / den


def circumradius2(T) -> np.ndarray:
    T = as_triangles(T)
    return np.abs(T[..., 0] - circumcenter(T)) ** 2


def inradius(T) -> np.ndarray:
    s = sidelengths(T)
    return 2 * np.abs(signed_area(T)) / s.sum(axis=-1)


def cosines(T) -> np.ndarray:
    s = sidelengths(T)
    s1, s2, s3 = np.moveaxis(s, -1, 0)
    return np.stack([(s2**2 + s3**2 - s1**2) / (2 * s2 * s3),
                     (s3**2 + s1**2 - s2**2) / (2 * s3 * s1),
                     (s1**2 + s2**2 - s3**2) / (2 * s1 * s2)], axis=-1)


def is_right(T, tol: float = RIGHT_TOL) -> np.ndarray:
    return np.any(np.abs(cosines(T)) < tol, axis=-1)


def derived_triangle(T, kind: str) -> np.ndarray:
    T = _check(T)
    P1, P2, P3 = T[..., 0], T[..., 1], T[..., 2]
    s = sidelengths(T)
    if kind == "medial":
        return np.stack([(P2 + P3) / 2, (P3 + P1) / 2, (P1 + P2) / 2], axis=-1)
    if kind == "anticomplementary":
        return np.stack([P2 + P3 - P1, P3 + P1 - P2, P1 + P2 - P3], axis=-1)
    if kind == "excentral":
        return np.stack([barycentric_point(T, s * [-1, 1, 1]),
                         barycentric_point(T, s * [1, -1, 1]),
                         barycentric_point(T, s * [1, 1, -1])], axis=-1)
    if kind in ("intouch", "extouch"):
        semi = s.sum(axis=-1, keepdims=True) / 2
        t = semi - s  # t_i = s - s_i
        out = []
        for i in range(3):
            j, k = (i + 1) % 3, (i + 2) % 3
            w = np.zeros_like(s)
            if kind == "intouch":  # touch point on side P_j P_k at distance s - s_j from P_j
                w[..., j], w[..., k] = t[..., k], t[..., j]
            else:
                w[..., j], w[..., k] = t[..., j], t[..., k]
            out.append(barycentric_point(T, w))
        return np.stack(out, axis=-1)
    if kind == "orthic":
        if np.any(is_right(T)):
            raise RightTriangle("orthic triangle degenerates at a right angle")
        feet = []
        for i in range(3):
            A, B, C = T[..., i], T[..., (i + 1) % 3], T[..., (i + 2) % 3]
            d = C - B
            t = ((A - B) * np.conj(d)).real / np.abs(d) ** 2
            feet.append(B + t * d)
        return np.stack(feet, axis=-1)
    if kind == "euler_triangle":
        H = center_X(T, 4)
        return (T + H[..., None]) / 2
    if kind == "tangential":
        if np.any(is_right(T)):
            raise TangentialUndefined("tangential triangle is unbounded at a right angle")
        sq = s * s
        return np.stack([barycentric_point(T, sq * [-1, 1, 1]),
                         barycentric_point(T, sq * [1, -1, 1]),
                         barycentric_point(T, sq * [1, 1, -1])], axis=-1)
    raise ValueError(f"unknown derived triangle {kind!r}")


def center_X(T, k: int) -> np.ndarray:
    """Kimberling center X_k for k in KIMBERLING."""
    T = _check(T)
    if k in (3, 4, 5, 20, 381):
        X2, X3 = T.mean(axis=-1), circumcenter(T)
        return {3: X3, 4: 3 * X2 - 2 * X3, 5: (3 * X2 - X3) / 2,
                20: 4 * X3 - 3 * X2, 381: 2 * X2 - X3}[k]
    if k == 2:
        return T.mean(axis=-1)
    s = sidelengths(T)
    if k == 1:
        return barycentric_point(T, s)
    if k == 6:
        return barycentric_point(T, s * s)
    if k == 9:
        return barycentric_point(T, s * (s.sum(axis=-1, keepdims=True) - 2 * s))
    if k == 10:
        return center_X(derived_triangle(T, "medial"), 1)
    if k == 26:
        return circumcenter(derived_triangle(T, "tangential"))
    if k == 40:
        return circumcenter(derived_triangle(T, "excentral"))
    if k == 1158:
        return circumcenter(derived_triangle(T, "extouch"))
    raise ValueError(f"X{k} is not supported; choose from {KIMBERLING}")


def euler_combo_point(T, alpha: complex, beta: complex) -> np.ndarray:
    """alpha * X2 + beta * X3 on the complex view of the plane."""
    T = _check(T)
    return alpha * T.mean(axis=-1) + beta * circumcenter(T)


@dataclass(frozen=True)
class CenterSpec:
    """A Kimberling index, a complex (alpha, beta) Euler combination or a real gamma."""

    kimberling: Optional[int] = None
    alpha: Optional[complex] = None
    beta: Optional[complex] = None

    @classmethod
    def X(cls, k: int) -> "CenterSpec":
        if k not in KIMBERLING:
            raise ValueError(f"unsupported center X{k}")
        return cls(kimberling=k)

    @classmethod
    def combo(cls, alpha, beta) -> "CenterSpec":
        return cls(alpha=complex(alpha), beta=complex(beta))

    @classmethod
    def gamma(cls, gamma: float) -> "CenterSpec":
        return cls.combo(1 - gamma, gamma)

    @classmethod
    def parse(cls, text: str) -> "CenterSpec":
        """``"X5"``, ``"gamma=-0.5"`` or ``"combo=3,-2"``."""
        t = text.strip()
        if t.upper().startswith("X"):
            return cls.X(int(t[1:]))
        key, _, val = t.partition("=")
        if key == "gamma":
            return cls.gamma(float(val))
        if key == "combo":
            al, be = (complex(v.replace("i", "j")) for v in val.split(","))
            return cls.combo(al, be)
        raise ValueError(f"cannot parse center spec {text!r}")

    @property
    def euler_coeffs(self) -> Optional[tuple]:
        """(alpha, beta) when the center is a fixed combination of X2 and X3."""
        if self.kimberling is None:
            return (self.alpha, self.beta)
        return {2: (1, 0), 3: (0, 1), 4: (3, -2), 5: (1.5, -0.5),
                20: (-3, 4), 381: (2, -1)}.get(self.kimberling)

    def label(self) -> str:
        if self.kimberling is not None:
            return f"X{self.kimberling}"
        return f"X[{self.alpha:g},{self.beta:g}]"

    def __call__(self, T) -> np.ndarray:
        if self.kimberling is not None:
            return center_X(T, self.kimberling)
        return euler_combo_point(T, self.alpha, self.beta)


def circle_params(T, kind: str):
    """Center and signed squared radius of a named circle (vectorized)."""
    T = _check(T)
    s = sidelengths(T)
    ssq = (s * s).sum(axis=-1)
    R2 = circumradius2(T)
    if kind == "circumcircle":
        return center_X(T, 3), R2
    if kind == "euler":
        return center_X(T, 5), R2 / 4
    if kind == "steiner_orthoptic":
        return center_X(T, 2), ssq / 18
    if kind == "orthocentroidal":
        return center_X(T, 381), R2 - ssq / 9
    if kind == "polar":
        return center_X(T, 4), 4 * R2 - ssq / 2
    if kind == "tangential":
        cprod = np.prod(cosines(T), axis=-1)
        if np.any(np.abs(cprod) < RIGHT_TOL):
            raise TangentialUndefined("tangential circle is unbounded at a right angle")
        return center_X(T, 26), R2 / (16 * cprod**2)
    if kind == "anticomplementary":
        return center_X(T, 4), 4 * R2
    if kind == "bevan":
        return center_X(T, 40), 4 * R2
    if kind == "spieker":
        return center_X(T, 10), (inradius(T) / 2) ** 2
    if kind == "mandart":
        return center_X(T, 1158), mandart_radius(T) ** 2
    if kind == "incircle":
        return center_X(T, 1), inradius(T) ** 2
    raise ValueError(f"unknown circle {kind!r}; choose from {CIRCLES}")


def mandart_radius(T) -> np.ndarray:
    s = sidelengths(T)
    R2 = circumradius2(T)
    s1, s2, s3 = np.moveaxis(s, -1, 0)
    semi = s.sum(axis=-1) / 2
    prod = (4 * R2 - s2 * s3) * (4 * R2 - s3 * s1) * (4 * R2 - s1 * s2)
    return semi / (s1 * s2 * s3) * np.sqrt(prod)


def named_circle(T, kind: str) -> SignedCircle:
    c, r2 = circle_params(T, kind)
    c, r2 = complex(np.asarray(c)), float(r2)
    return SignedCircle(PlanePoint.of(c), r2, signed=(kind == "polar" or r2 < 0))
