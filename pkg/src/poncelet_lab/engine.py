"""Admissible ellipse pairs and their 3-periodic families.

Every family is carried in Blaschke normal form: the outer ellipse
``(a, b)`` is the image of the unit circle under ``L(z) = p z + q conj(z)``
and the triangles are images of the roots of ``B(z) = lam``, where ``B`` is
the degree-3 Blaschke product with zeros ``0, f, g``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import (
    DegenerateCaustic,
    InadmissiblePair,
    InfeasibleParams,
    OffDisk,
    PointInside,
    TangentFailure,
)
from .geometry import EllipseSpec, PlanePoint, foci, linear_image, point_at, tangents_from

NAMED_FAMILIES = (
    "incircle",
    "circumcircle",
    "homothetic",
    "confocal",
    "excentral",
    "concentric_tilted",
)


@dataclass(frozen=True)
class PairSpec:
    """Outer ellipse centered at O with theta = 0, nested inner ellipse."""

    outer: EllipseSpec
    inner: EllipseSpec

    def __post_init__(self):
        o = self.outer
        if abs(o.center.x) > 1e-12 or abs(o.center.y) > 1e-12 or o.theta != 0.0:
            raise ValueError("outer ellipse must be centered at O with theta = 0; use normalize_pair")
        if np.max(o.level(self.inner.sample(256))) >= 0:
            raise ValueError("inner ellipse is not strictly inside the outer one")

    @property
    def is_concentric(self) -> bool:
        return abs(self.inner.center.z) < 1e-12


def normalize_pair(outer: EllipseSpec, inner: EllipseSpec) -> PairSpec:
    """Rigidly move (and rescale when a > 10) so the outer ellipse is canonical."""
    rot = complex(math.cos(outer.theta), -math.sin(outer.theta))
    scale = 1.0 / outer.a if outer.a > 10 else 1.0
    zc = (inner.center.z - outer.center.z) * rot * scale
    new_outer = EllipseSpec(PlanePoint(0.0, 0.0), outer.a * scale, outer.b * scale, 0.0)
    new_inner = EllipseSpec(PlanePoint.of(zc), inner.a * scale, inner.b * scale, inner.theta - outer.theta)
    return PairSpec(new_outer, new_inner)


@dataclass(frozen=True)
class FamilyHandle:
    pair: PairSpec
    p: float
    q: float
    f: complex
    g: complex
    family: Optional[str] = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def a(self) -> float:
        return self.p + self.q

    @property
    def b(self) -> float:
        return self.p - self.q


@dataclass(frozen=True)
class TriangleSample:
    lam: complex
    vertices: tuple
    sides: tuple

    @property
    def z(self) -> np.ndarray:
        return np.array([v.z for v in self.vertices])


def _check_disk(f, g):
    if abs(f) >= 1 or abs(g) >= 1:
        raise OffDisk(f"foci must lie in the open unit disk, got |f|={abs(f):.6g}, |g|={abs(g):.6g}")


def blaschke_roots(f: complex, g: complex, lam) -> np.ndarray:
    """Roots of ``B(z) = lam`` for one or many unit ``lam``.

    Companion-matrix eigenvalues followed by a Newton step, sorted by
    principal argument.  Returns shape ``lam.shape + (3,)``.
    """
    f, g = complex(f), complex(g)
    _check_disk(f, g)
    lam = np.asarray(lam, dtype=complex)
    fc, gc = f.conjugate(), g.conjugate()
    s1 = f + g + lam * fc * gc
    s2 = f * g + lam * (fc + gc)
    s3 = lam
    shape = lam.shape
    s1, s2, s3 = s1.ravel(), s2.ravel(), s3.ravel()
    comp = np.zeros((s1.size, 3, 3), dtype=complex)
    comp[:, 0, 0] = s1
    comp[:, 0, 1] = -s2
    comp[:, 0, 2] = s3
    comp[:, 1, 0] = 1
    comp[:, 2, 1] = 1
    z = np.linalg.eigvals(comp)
    s1, s2, s3 = s1[:, None], s2[:, None], s3[:, None]
    poly = ((z - s1) * z + s2) * z - s3
    dpoly = (3 * z - 2 * s1) * z + s2
    safe = np.abs(dpoly) > 1e-8
    z = np.where(safe, z - poly / np.where(safe, dpoly, 1), z)
    z = np.take_along_axis(z, np.argsort(np.angle(z), axis=-1), axis=-1)
    return z.reshape(shape + (3,))


def blaschke_caustic(f: complex, g: complex) -> EllipseSpec:
    """Inellipse of the unit-circle family: foci f, g and major axis |1 - conj(f) g|."""
    f, g = complex(f), complex(g)
    _check_disk(f, g)
    major = abs(1 - f.conjugate() * g)
    focal = abs(f - g)
    if major <= focal + 1e-14:
        raise DegenerateCaustic("major axis does not exceed the focal distance")
    a = major / 2
    c = focal / 2
    b = math.sqrt((a - c) * (a + c))
    theta = math.atan2((g - f).imag, (g - f).real) if focal > 0 else 0.0
    return EllipseSpec(PlanePoint.of((f + g) / 2), a, b, theta)


def _sorted_foci(e: EllipseSpec):
    f1, f2 = (p.z for p in foci(e))
    return tuple(sorted((f1, f2), key=lambda z: math.atan2(z.imag, z.real)))


def handle_from_pair(pair: PairSpec, family=None, params=None, tol: float = 1e-9) -> FamilyHandle:
    """Recover the Blaschke data (f, g) of an admissible pair.

    The inner ellipse is mapped through diag(1/a, 1/b); its foci are (f, g)
    and the pair is rejected unless the major axis equals |1 - conj(f) g|.
    """
    a, b = pair.outer.a, pair.outer.b
    img = linear_image(np.diag([1 / a, 1 / b]), pair.inner)
    f, g = _sorted_foci(img)
    if abs(f) >= 1 or abs(g) >= 1:
        raise InadmissiblePair("caustic foci leave the unit disk")
    resid = abs(2 * img.a - abs(1 - f.conjugate() * g))
    if resid > tol:
        raise InadmissiblePair(f"axis identity fails by {resid:.3g}", residual=resid)
    return FamilyHandle(pair, (a + b) / 2, (a - b) / 2, f, g, family, dict(params or {}))


def generic_pair(a: float, b: float, f: complex, g: complex) -> FamilyHandle:
    """Pair obtained by stretching a unit-circle Blaschke family by diag(a, b)."""
    if not a >= b > 0:
        raise ValueError("need a >= b > 0")
    caustic = blaschke_caustic(f, g)
    inner = linear_image(np.diag([a, b]), caustic)
    outer = EllipseSpec(PlanePoint(0.0, 0.0), a, b, 0.0)
    return FamilyHandle(PairSpec(outer, inner), (a + b) / 2, (a - b) / 2, complex(f), complex(g),
                        "blaschke", {"a": a, "b": b, "f": complex(f), "g": complex(g)})


def delta(a: float, b: float) -> float:
    return math.sqrt(a**4 - a * a * b * b + b**4)


def tilted_cos2(a, b, ac, bc) -> float:
    c2 = a * a - b * b
    cc2 = ac * ac - bc * bc
    num = (a * ac + b * bc) ** 2 - a * a * b * b
    if c2 * cc2 == 0:
        if abs(num) > 1e-12:
            raise InfeasibleParams("axis-aligned Cayley relation fails and theta is undetermined")
        return 1.0
    return num / (c2 * cc2)


def build_named_pair(kind: str, **params) -> FamilyHandle:
    """Construct one of the classical concentric families.

    ``incircle``, ``homothetic``, ``confocal``, ``excentral`` take ``a, b``
    (for ``excentral`` these are the billiard axes, i.e. the caustic);
    ``circumcircle`` takes ``R`` and ``ac``; ``concentric_tilted`` takes
    ``a, b, ac, bc``.
    """
    O = PlanePoint(0.0, 0.0)
    if kind == "incircle":
        a, b = params["a"], params["b"]
        r = a * b / (a + b)
        outer, inner = EllipseSpec(O, a, b), EllipseSpec.circle(O, r)
    elif kind == "circumcircle":
        R, ac = params["R"], params["ac"]
        bc = params.get("bc", R - ac)
        if not (0 < ac < R and 0 < bc < R):
            raise InfeasibleParams("need 0 < ac, bc < R")
        outer, inner = EllipseSpec.circle(O, R), EllipseSpec(O, ac, bc)
    elif kind == "homothetic":
        a, b = params["a"], params["b"]
        outer, inner = EllipseSpec(O, a, b), EllipseSpec(O, a / 2, b / 2)
    elif kind == "confocal":
        a, b = params["a"], params["b"]
        c2 = a * a - b * b
        if c2 <= 0:
            raise InfeasibleParams("confocal family needs a > b")
        d = delta(a, b)
        ac, bc = a * (d - b * b) / c2, b * (a * a - d) / c2
        if ac <= 0 or bc <= 0:
            raise InfeasibleParams("confocal caustic axes are nonpositive")
        outer, inner = EllipseSpec(O, a, b), EllipseSpec(O, ac, bc)
    elif kind == "excentral":
        a, b = params["a"], params["b"]
        if a <= b:
            raise InfeasibleParams("excentral family needs a > b")
        d = delta(a, b)
        ae, be = (a * a + d) / b, (b * b + d) / a
        # the excenter locus is elongated across the billiard's major axis,
        # so in the canonical frame the billiard caustic stands upright
        outer, inner = EllipseSpec(O, ae, be), EllipseSpec(O, a, b, math.pi / 2)
    elif kind == "concentric_tilted":
        a, b, ac, bc = params["a"], params["b"], params["ac"], params["bc"]
        cos2 = tilted_cos2(a, b, ac, bc)
        if not -1e-12 <= cos2 <= 1 + 1e-12:
            raise InfeasibleParams(f"cos^2(theta) = {cos2:.6g} outside [0, 1]")
        theta = math.acos(math.sqrt(min(max(cos2, 0.0), 1.0)))
        try:
            outer, inner = EllipseSpec(O, a, b), EllipseSpec(O, ac, bc, theta)
        except ValueError as exc:
            raise InfeasibleParams(str(exc)) from exc
        params = dict(params, theta=theta)
    else:
        raise ValueError(f"unknown family {kind!r}; expected one of {NAMED_FAMILIES}")
    try:
        pair = PairSpec(outer, inner)
    except ValueError as exc:
        raise InfeasibleParams(str(exc)) from exc
    h = handle_from_pair(pair, kind, params)
    res = closure_check(pair, 0.3, 1e-9)
    if not res.closed:
        raise InadmissiblePair(f"{kind} pair fails closure", residual=res.residual)
    return h


def cayley_residual(pair: PairSpec) -> float:
    """Absolute value of the 3-periodic Cayley polynomial (advisory only).

    Concentric pairs use the cos^2(theta) relation; others the generic
    quartic in the inner center (with its trailing bracket
    closed after the cos^2 term).
    """
    a, b = pair.outer.a, pair.outer.b
    ac, bc, th = pair.inner.a, pair.inner.b, pair.inner.theta
    c2, cc2 = a * a - b * b, ac * ac - bc * bc
    ct, st = math.cos(th), math.sin(th)
    if pair.is_concentric:
        return abs(a * a * b * b + ct * ct * c2 * cc2 - (a * ac + b * bc) ** 2)
    xc, yc = pair.inner.center
    r = (b**4 * xc**4 + 2 * a * a * b * b * xc**2 * yc**2
         + (2 * cc2 * (-b * b * (a * a + b * b)) * ct**2
            - 2 * (b * b - bc * bc) * b * b * a * a - 2 * b**4 * bc * bc) * xc**2
         - 8 * a * a * b * b * xc * yc * cc2 * st * ct + a**4 * yc**4
         + (2 * cc2 * a * a * (a * a + b * b) * ct**2
            - 2 * (bc * bc + b * b) * a**4 + 2 * a * a * b * b * bc * bc) * yc**2
         + cc2**2 * c2**2 * ct**4
         - 2 * cc2 * c2 * (a * a * ac * ac - b * b * a * a + bc * bc * b * b) * ct**2
         + (a * ac + a * b - b * bc) * (a * ac - a * b - b * bc)
         * (a * ac + a * b + b * bc) * (a * ac - a * b + b * bc))
    return abs(r)


@dataclass(frozen=True)
class ClosureResult:
    closed: bool
    residual: float


def _second_intersection(outer: EllipseSpec, z: complex, d: complex) -> complex:
    w = complex(outer.to_local(z))
    e = complex(outer.to_local(z + d)) - w
    A = abs(e) ** 2
    B = 2 * (w.real * e.real + w.imag * e.imag)
    C = abs(w) ** 2 - 1
    disc = math.sqrt(max(B * B - 4 * A * C, 0.0))
    qq = -0.5 * (B + math.copysign(disc, B))
    roots = [qq / A, C / qq if qq != 0 else 0.0]
    t = max(roots, key=abs)
    return z + t * d


def closure_check(pair: PairSpec, seed: float = 0.0, tol: float = 1e-9) -> ClosureResult:
    """Follow the left-hand tangent chord three times from ``point_at(outer, seed)``."""
    start = point_at(pair.outer, seed).z
    z = start
    for _ in range(3):
        try:
            t, _other = tangents_from(pair.inner, z)
        except PointInside as exc:
            raise TangentFailure("chord iterate fell inside the caustic") from exc
        z = _second_intersection(pair.outer, z, t.z - z)
    residual = abs(z - start)
    return ClosureResult(bool(residual < tol), float(residual))


def sidelengths_of(zs: np.ndarray) -> np.ndarray:
    return np.abs(np.roll(zs, -1, axis=-1) - np.roll(zs, -2, axis=-1))


def family_lambdas(n: int) -> np.ndarray:
    if n < 3:
        raise ValueError("need at least 3 samples")
    return np.exp(2j * np.pi * np.arange(n) / n)


def family_vertices(h: FamilyHandle, n: int) -> np.ndarray:
    """Vertex array of shape (n, 3) for lam_k = exp(2 pi i k / n)."""
    z = blaschke_roots(h.f, h.g, family_lambdas(n))
    return h.p * z + h.q * np.conj(z)


def vertices_at(h: FamilyHandle, lam: complex) -> TriangleSample:
    z = blaschke_roots(h.f, h.g, lam)
    v = h.p * z + h.q * np.conj(z)
    s = sidelengths_of(v)
    return TriangleSample(complex(lam), tuple(PlanePoint.of(x) for x in v), tuple(map(float, s)))


def sample_family(h: FamilyHandle, n: int) -> list:
    lams = family_lambdas(n)
    V = family_vertices(h, n)
    return [TriangleSample(complex(l), tuple(PlanePoint.of(x) for x in v), tuple(map(float, sidelengths_of(v))))
            for l, v in zip(lams, V)]


def tangency_residuals(inner: EllipseSpec, V: np.ndarray) -> np.ndarray:
    """|distance - 1| of each side line from the origin in the caustic's unit frame."""
    W = inner.to_local(np.asarray(V))
    P, Q = W, np.roll(W, -1, axis=-1)
    d = Q - P
    cross = np.abs(P.real * d.imag - P.imag * d.real)
    return np.abs(cross / np.abs(d) - 1.0)


def seeded_rng(seed=None) -> np.random.Generator:
    """RNG for randomized pair generation; ``PONCELET_SEED`` overrides ``None``."""
    import os

    if seed is None:
        env = os.environ.get("PONCELET_SEED")
        seed = int(env) if env not in (None, "") else 0
    return np.random.default_rng(seed)


def _disk_point(rng, rmax):
    return rmax * math.sqrt(rng.random()) * complex(math.cos(t := 2 * math.pi * rng.random()), math.sin(t))


def random_generic_pair(rng: np.random.Generator, rmax: float = 0.6,
                        min_offset: float = 0.05) -> FamilyHandle:
    """Random Blaschke pair with a clearly nonconcentric caustic."""
    while True:
        f, g = _disk_point(rng, rmax), _disk_point(rng, rmax)
        if abs(f + g) / 2 < min_offset:
            continue
        a = 1.0 + rng.random()
        return generic_pair(a, 1.0, f, g)


def random_concentric_blaschke_pair(rng: np.random.Generator, rmax: float = 0.6) -> FamilyHandle:
    f = _disk_point(rng, rmax)
    return generic_pair(1.0 + rng.random(), 1.0, f, -f)


def random_tilted_pair(rng: np.random.Generator, cos2_range=(0.05, 0.95)) -> FamilyHandle:
    """Random concentric pair with a genuinely tilted caustic."""
    while True:
        a = 1.2 + rng.random()
        ac, bc = sorted(rng.uniform(0.05, 0.95, size=2), reverse=True)
        try:
            cos2 = tilted_cos2(a, 1.0, ac, bc)
        except InfeasibleParams:
            continue
        if not cos2_range[0] < cos2 < cos2_range[1]:
            continue
        try:
            return build_named_pair("concentric_tilted", a=a, b=1.0, ac=float(ac), bc=float(bc))
        except (InfeasibleParams, InadmissiblePair, ValueError):
            continue
