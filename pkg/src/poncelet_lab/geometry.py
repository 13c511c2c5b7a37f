"""Plane primitives: points, ellipses, signed circles and conics.

Points are handled interchangeably as ``PlanePoint`` pairs and as Python
complex numbers ``x + iy``.  Every value here is immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .exceptions import DegenerateConic, PointInside, SingularMap

CIRCLE_TOL = 1e-12


class PlanePoint(NamedTuple):
    x: float
    y: float

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def __complex__(self):
        return complex(self.x, self.y)

    @classmethod
    def of(cls, p) -> "PlanePoint":
        z = as_complex(p)
        return cls(float(z.real), float(z.imag))


PointLike = Union[PlanePoint, complex, float, tuple]


def as_complex(p) -> complex:
    """Coerce a PlanePoint, (x, y) pair or number to ``complex``."""
    if isinstance(p, (complex, float, int, np.number)):
        return complex(p)
    if isinstance(p, PlanePoint):
        return p.z
    x, y = p
    return complex(x, y)


def normalize_angle(theta: float) -> float:
    """Map an axis angle into (-pi/2, pi/2]."""
    t = math.fmod(theta + math.pi / 2, math.pi)
    if t < 0:
        t += math.pi
    t -= math.pi / 2
    if t <= -math.pi / 2 + 1e-15:
        t = math.pi / 2
    return t


def _rot(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class EllipseSpec:
    """Ellipse with center, semi-axes ``a >= b > 0`` and major-axis angle.

    Inputs with ``b > a`` are swapped (and rotated by pi/2) on construction,
    the angle is normalized to (-pi/2, pi/2] and circles get ``theta = 0``.
    """

    center: PlanePoint
    a: float
    b: float
    theta: float = 0.0

    def __post_init__(self):
        a, b, th = float(self.a), float(self.b), float(self.theta)
        if not (a > 0 and b > 0) or not all(map(math.isfinite, (a, b, th))):
            raise ValueError(f"semi-axes must be positive and finite, got {a}, {b}")
        if b > a:
            a, b, th = b, a, th + math.pi / 2
        th = normalize_angle(th)
        if a - b < CIRCLE_TOL:
            th = 0.0
        object.__setattr__(self, "center", PlanePoint.of(self.center))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "theta", th)

    @classmethod
    def circle(cls, center, r: float) -> "EllipseSpec":
        return cls(PlanePoint.of(center), r, r, 0.0)

    @property
    def c(self) -> float:
        """Half focal distance."""
        return math.sqrt(max(self.a * self.a - self.b * self.b, 0.0))

    @property
    def is_circle(self) -> bool:
        return self.a - self.b < CIRCLE_TOL

    def to_local(self, z):
        """Map plane points (complex, any shape) to the frame where this is the unit circle."""
        w = (np.asarray(z) - self.center.z) * complex(math.cos(self.theta), -math.sin(self.theta))
        return w.real / self.a + 1j * w.imag / self.b

    def from_local(self, w):
        w = np.asarray(w)
        z = self.a * w.real + 1j * self.b * w.imag
        return z * complex(math.cos(self.theta), math.sin(self.theta)) + self.center.z

    def level(self, z):
        """Implicit value |local(z)|^2 - 1: negative inside, zero on the curve."""
        return np.abs(self.to_local(z)) ** 2 - 1.0

    def sample(self, n: int) -> np.ndarray:
        t = 2 * np.pi * np.arange(n) / n
        return self.from_local(np.exp(1j * t))

    def to_conic(self) -> "ConicCoeffs":
        R = _rot(self.theta)
        M = R @ np.diag([1 / self.a**2, 1 / self.b**2]) @ R.T
        c = np.array(self.center)
        Mc = M @ c
        return ConicCoeffs.from_raw(
            M[0, 0], 2 * M[0, 1], M[1, 1], -2 * Mc[0], -2 * Mc[1], c @ Mc - 1.0
        )


@dataclass(frozen=True)
class ConicCoeffs:
    """Coefficients of A x^2 + B xy + C y^2 + D x + E y + F = 0.

    Stored with unit Euclidean norm and the first nonzero of (A, B, C)
    positive.  Build through :meth:`from_raw`.
    """

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    @classmethod
    def from_raw(cls, A, B, C, D, E, F) -> "ConicCoeffs":
        v = np.array([A, B, C, D, E, F], dtype=float)
        nrm = np.linalg.norm(v)
        if nrm == 0 or not np.isfinite(nrm):
            raise DegenerateConic("zero or non-finite coefficient vector")
        v /= nrm
        lead = next((x for x in v[:3] if abs(x) > 1e-15), v[3] if abs(v[3]) > 1e-15 else v[4])
        if lead < 0:
            v = -v
        return cls(*map(float, v))

    def as_array(self) -> np.ndarray:
        return np.array([self.A, self.B, self.C, self.D, self.E, self.F])

    def __call__(self, x, y):
        return (self.A * x * x + self.B * x * y + self.C * y * y
                + self.D * x + self.E * y + self.F)

    def matrix(self) -> np.ndarray:
        """Symmetric 3x3 homogeneous matrix."""
        A, B, C, D, E, F = self.as_array()
        return np.array([[A, B / 2, D / 2], [B / 2, C, E / 2], [D / 2, E / 2, F]])

    @property
    def discriminant(self) -> float:
        return self.B * self.B - 4 * self.A * self.C


class ConicClass(NamedTuple):
    kind: str  # "ellipse" | "parabola" | "hyperbola" | "degenerate"
    ellipse: Optional[EllipseSpec] = None


def conic_classify(c: ConicCoeffs, tol: float = 1e-12) -> ConicClass:
    """Classify a unit-norm conic and extract ellipse parameters when elliptic.

    Imaginary ellipses, single points and line pairs are all ``degenerate``.
    """
    if abs(c.A) + abs(c.B) + abs(c.C) < tol:
        raise DegenerateConic("no quadratic part: the equation is linear")
    H = c.matrix()
    disc = c.discriminant
    if abs(np.linalg.det(H)) < tol:
        return ConicClass("degenerate")
    if disc > tol:
        return ConicClass("hyperbola")
    if disc >= -tol:
        return ConicClass("parabola")
    Q = H[:2, :2]
    center = np.linalg.solve(Q, -H[:2, 2])
    Fc = c.F + 0.5 * (c.D * center[0] + c.E * center[1])
    M = Q / -Fc
    w, V = np.linalg.eigh(M)
    if w[0] <= 0:
        return ConicClass("degenerate")
    a, b = 1 / math.sqrt(w[0]), 1 / math.sqrt(w[1])
    theta = math.atan2(V[1, 0], V[0, 0])
    return ConicClass("ellipse", EllipseSpec(PlanePoint(*center), a, b, theta))


def ellipse_from_conic(c: ConicCoeffs) -> EllipseSpec:
    cls = conic_classify(c)
    if cls.kind != "ellipse":
        raise DegenerateConic(f"conic is a {cls.kind}, not an ellipse")
    return cls.ellipse


def point_at(e: EllipseSpec, t: float) -> PlanePoint:
    return PlanePoint.of(complex(e.from_local(complex(math.cos(t), math.sin(t)))))


def foci(e: EllipseSpec) -> tuple[PlanePoint, PlanePoint]:
    d = e.c * complex(math.cos(e.theta), math.sin(e.theta))
    z = e.center.z
    return PlanePoint.of(z + d), PlanePoint.of(z - d)


def linear_image(M, e: EllipseSpec) -> EllipseSpec:
    """Image of ``e`` under the linear map ``x -> M x`` (quadratic-form congruence)."""
    M = np.asarray(M, dtype=float)
    det = np.linalg.det(M)
    if abs(det) < 1e-14:
        raise SingularMap(f"|det M| = {abs(det):.3g}")
    H = np.eye(3)
    H[:2, :2] = np.linalg.inv(M)
    Q = H.T @ e.to_conic().matrix() @ H
    c = ConicCoeffs.from_raw(Q[0, 0], 2 * Q[0, 1], Q[1, 1], 2 * Q[0, 2], 2 * Q[1, 2], Q[2, 2])
    return ellipse_from_conic(c)


@dataclass(frozen=True)
class SignedCircle:
    """Circle x^2 + y^2 + Dx + Ey + F = 0 with signed squared radius.

    ``r2 < 0`` is allowed only with ``signed=True`` (polar circles of acute
    triangles, pencil members beyond the limiting points).
    """

    center: PlanePoint
    r2: float
    signed: bool = field(default=False)

    def __post_init__(self):
        object.__setattr__(self, "center", PlanePoint.of(self.center))
        object.__setattr__(self, "r2", float(self.r2))
        if self.r2 < 0 and not self.signed:
            raise ValueError("negative squared radius on an unsigned circle")

    @classmethod
    def from_coeffs(cls, D, E, F, signed: bool = True) -> "SignedCircle":
        return cls(PlanePoint(-D / 2, -E / 2), D * D / 4 + E * E / 4 - F, signed)

    @property
    def coeffs(self) -> tuple[float, float, float]:
        x, y = self.center
        return (-2 * x, -2 * y, x * x + y * y - self.r2)

    @property
    def radius(self) -> float:
        return math.sqrt(self.r2) if self.r2 >= 0 else float("nan")


def power(p, circ: SignedCircle) -> float:
    """Power of ``p``: squared distance to the center minus the signed r2."""
    z = as_complex(p)
    return abs(z - circ.center.z) ** 2 - circ.r2


def tangents_from(e: EllipseSpec, p) -> tuple[PlanePoint, PlanePoint]:
    """The two tangency points on ``e`` of the tangent lines through ``p``.

    The first point has the ellipse on the left of the ray ``p -> T``.
    """
    q = complex(e.to_local(as_complex(p)))
    rho = abs(q)
    if rho <= 1 + 1e-12:
        raise PointInside("point is on or inside the ellipse")
    phi = math.atan2(q.imag, q.real)
    half = math.acos(1 / rho)
    t1 = complex(e.from_local(complex(math.cos(phi + half), math.sin(phi + half))))
    t2 = complex(e.from_local(complex(math.cos(phi - half), math.sin(phi - half))))
    # local maps with det > 0 preserve orientation: phi + half is the left-hand tangent
    return PlanePoint.of(t1), PlanePoint.of(t2)
