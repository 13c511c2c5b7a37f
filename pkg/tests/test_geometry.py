import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from poncelet_lab.exceptions import DegenerateConic, PointInside, SingularMap
from poncelet_lab.geometry import (
    ConicCoeffs,
    EllipseSpec,
    PlanePoint,
    SignedCircle,
    conic_classify,
    ellipse_from_conic,
    foci,
    linear_image,
    normalize_angle,
    point_at,
    power,
    tangents_from,
)

O = PlanePoint(0.0, 0.0)

coord = st.floats(-3, 3)
axis = st.floats(0.2, 3)
angle = st.floats(-math.pi, math.pi)


def same_ellipse(e1, e2, tol):
    assert e1.center.x == pytest.approx(e2.center.x, abs=tol)
    assert e1.center.y == pytest.approx(e2.center.y, abs=tol)
    assert e1.a == pytest.approx(e2.a, abs=tol)
    assert e1.b == pytest.approx(e2.b, abs=tol)
    if e1.a - e1.b > 1e-6:
        d = (e1.theta - e2.theta) % math.pi
        assert min(d, math.pi - d) < tol * 1e3


class TestPlanePoint:
    def test_complex_round_trip(self):
        p = PlanePoint(0.25, -1.5)
        assert PlanePoint.of(complex(p)) == p
        assert p.z == 0.25 - 1.5j

    def test_of_accepts_pairs(self):
        assert PlanePoint.of((1, 2)) == PlanePoint(1.0, 2.0)


class TestEllipseSpec:
    def test_swaps_axes(self):
        e = EllipseSpec(O, 1.0, 2.0, 0.0)
        assert (e.a, e.b) == (2.0, 1.0)
        assert e.theta == pytest.approx(math.pi / 2)

    def test_circle_has_zero_theta(self):
        assert EllipseSpec(O, 1.0, 1.0, 0.7).theta == 0.0

    def test_theta_range(self):
        assert EllipseSpec(O, 2, 1, -math.pi / 2).theta == pytest.approx(math.pi / 2)
        assert EllipseSpec(O, 2, 1, 3 * math.pi / 4).theta == pytest.approx(-math.pi / 4)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            EllipseSpec(O, 1.0, 0.0)

    @given(coord, coord, axis, axis, angle)
    def test_conic_round_trip(self, x, y, a, b, th):
        e = EllipseSpec(PlanePoint(x, y), a, b, th)
        same_ellipse(ellipse_from_conic(e.to_conic()), e, 1e-9)

    def test_conic_round_trip_many(self, rng):
        worst = 0.0
        for _ in range(1000):
            a, b = rng.uniform(0.2, 3, 2)
            e = EllipseSpec(PlanePoint(*rng.uniform(-2, 2, 2)), a, b, rng.uniform(-3, 3))
            f = ellipse_from_conic(e.to_conic())
            worst = max(worst, abs(f.center.z - e.center.z), abs(f.a - e.a), abs(f.b - e.b))
        assert worst < 1e-12


class TestPointAt:
    def test_unit_circle(self):
        p = point_at(EllipseSpec.circle(O, 1), 0.0)
        assert p == pytest.approx((1.0, 0.0))

    def test_quarter_turn(self):
        p = point_at(EllipseSpec(O, 2, 1), math.pi / 2)
        assert p == pytest.approx((0.0, 1.0), abs=1e-15)

    def test_rotated(self):
        p = point_at(EllipseSpec(O, 2, 1, math.pi / 4), 0.0)
        assert p == pytest.approx((math.sqrt(2), math.sqrt(2)))

    @given(coord, coord, axis, axis, angle, angle)
    def test_on_curve(self, x, y, a, b, th, t):
        e = EllipseSpec(PlanePoint(x, y), a, b, th)
        assert abs(e.level(point_at(e, t).z)) < 1e-12


class TestFoci:
    def test_axis_aligned(self):
        f1, f2 = foci(EllipseSpec(O, 2, 1))
        assert {round(f1.x, 12), round(f2.x, 12)} == {round(math.sqrt(3), 12), round(-math.sqrt(3), 12)}

    def test_circle(self):
        f1, f2 = foci(EllipseSpec.circle((0.5, 0.5), 1))
        assert f1 == f2 == PlanePoint(0.5, 0.5)

    def test_345(self):
        f1, f2 = foci(EllipseSpec(PlanePoint(1, 1), 5, 3))
        assert f1 == pytest.approx((5, 1))
        assert f2 == pytest.approx((-3, 1))


class TestLinearImage:
    def test_identity(self):
        e = EllipseSpec(PlanePoint(0.1, 0.2), 2, 1, 0.3)
        same_ellipse(linear_image(np.eye(2), e), e, 1e-12)

    def test_to_unit_circle(self):
        same_ellipse(linear_image(np.diag([0.5, 1]), EllipseSpec(O, 2, 1)), EllipseSpec.circle(O, 1), 1e-12)

    def test_scaled_circle(self):
        img = linear_image(np.diag([1.5, 1]), EllipseSpec.circle((0.2, 0), 0.5))
        same_ellipse(img, EllipseSpec(PlanePoint(0.3, 0), 0.75, 0.5, 0), 1e-12)

    def test_singular(self):
        with pytest.raises(SingularMap):
            linear_image(np.array([[1, 2], [2, 4]]), EllipseSpec(O, 2, 1))

    @given(st.lists(st.floats(-2, 2), min_size=8, max_size=8), axis, axis, angle)
    def test_composition(self, m, a, b, th):
        M1, M2 = np.reshape(m[:4], (2, 2)), np.reshape(m[4:], (2, 2))
        if min(abs(np.linalg.det(M1)), abs(np.linalg.det(M2))) < 0.1:
            return
        e = EllipseSpec(PlanePoint(0.3, -0.2), a, b, th)
        two_step = linear_image(M2, linear_image(M1, e))
        one_step = linear_image(M2 @ M1, e)
        scale = max(one_step.a, 1.0)
        assert abs(two_step.center.z - one_step.center.z) < 1e-10 * scale
        assert abs(two_step.a - one_step.a) < 1e-10 * scale
        assert abs(two_step.b - one_step.b) < 1e-10 * scale

    def test_samples_map_onto_image(self):
        M = np.array([[1.2, 0.4], [-0.3, 0.9]])
        e = EllipseSpec(PlanePoint(0.1, 0.2), 1.3, 0.4, 0.5)
        z = e.sample(64)
        w = M @ np.vstack([z.real, z.imag])
        img = linear_image(M, e)
        assert np.max(np.abs(img.level(w[0] + 1j * w[1]))) < 1e-10


class TestConicClassify:
    def test_circle(self):
        cls = conic_classify(ConicCoeffs.from_raw(1, 0, 1, 0, 0, -1))
        assert cls.kind == "ellipse"
        same_ellipse(cls.ellipse, EllipseSpec.circle(O, 1), 1e-12)

    def test_ellipse(self):
        cls = conic_classify(ConicCoeffs.from_raw(0.25, 0, 1, 0, 0, -1))
        same_ellipse(cls.ellipse, EllipseSpec(O, 2, 1), 1e-12)

    def test_line_pair(self):
        assert conic_classify(ConicCoeffs.from_raw(1, 0, -1, 0, 0, 0)).kind == "degenerate"

    def test_hyperbola_and_parabola(self):
        assert conic_classify(ConicCoeffs.from_raw(1, 0, -1, 0, 0, -1)).kind == "hyperbola"
        assert conic_classify(ConicCoeffs.from_raw(1, 0, 0, 0, -1, 0)).kind == "parabola"

    def test_imaginary_ellipse_is_degenerate(self):
        assert conic_classify(ConicCoeffs.from_raw(1, 0, 1, 0, 0, 1)).kind == "degenerate"

    def test_linear_equation_raises(self):
        with pytest.raises(DegenerateConic):
            conic_classify(ConicCoeffs.from_raw(0, 0, 0, 1, 1, 0))

    def test_normalization(self):
        c = ConicCoeffs.from_raw(-2, 0, -2, 0, 0, 2)
        assert np.linalg.norm(c.as_array()) == pytest.approx(1.0)
        assert c.A > 0


class TestPower:
    def test_examples(self):
        unit = SignedCircle(O, 1.0)
        assert power(O, unit) == -1.0
        assert power((2, 0), unit) == 3.0
        assert power(O, SignedCircle(PlanePoint(3, 4), 25.0)) == 0.0

    @given(coord, coord, coord, coord, st.floats(0, 4))
    def test_matches_coefficients(self, px, py, cx, cy, r2):
        c = SignedCircle(PlanePoint(cx, cy), r2)
        D, E, F = c.coeffs
        assert power((px, py), c) == pytest.approx(px * px + py * py + D * px + E * py + F, abs=1e-12)

    @given(coord, coord, coord, coord, st.floats(0, 4), angle, coord, coord)
    def test_rigid_motion(self, px, py, cx, cy, r2, th, tx, ty):
        rot, shift = complex(math.cos(th), math.sin(th)), complex(tx, ty)
        c = SignedCircle(PlanePoint(cx, cy), r2)
        moved = SignedCircle(PlanePoint.of(complex(cx, cy) * rot + shift), r2)
        assert power(complex(px, py) * rot + shift, moved) == pytest.approx(power((px, py), c), abs=1e-12)


class TestSignedCircle:
    def test_coefficients_round_trip(self):
        c = SignedCircle.from_coeffs(-2.0, 4.0, 1.0)
        assert c.center == PlanePoint(1.0, -2.0)
        assert c.r2 == pytest.approx(4.0)
        assert c.coeffs == pytest.approx((-2.0, 4.0, 1.0))

    def test_negative_radius_requires_flag(self):
        with pytest.raises(ValueError):
            SignedCircle(O, -1.0)
        assert math.isnan(SignedCircle(O, -1.0, signed=True).radius)


class TestTangents:
    def test_unit_circle_right(self):
        pts = sorted(tangents_from(EllipseSpec.circle(O, 1), (2, 0)), key=lambda p: p.y)
        assert pts[0] == pytest.approx((0.5, -math.sqrt(3) / 2))
        assert pts[1] == pytest.approx((0.5, math.sqrt(3) / 2))

    def test_unit_circle_top(self):
        pts = sorted(tangents_from(EllipseSpec.circle(O, 1), (0, 2)), key=lambda p: p.x)
        assert pts[0] == pytest.approx((-math.sqrt(3) / 2, 0.5))
        assert pts[1] == pytest.approx((math.sqrt(3) / 2, 0.5))

    def test_inside(self):
        with pytest.raises(PointInside):
            tangents_from(EllipseSpec(O, 2, 1), (0.5, 0.1))

    def test_first_is_left_hand(self):
        p = 2 + 0j
        t1, _ = tangents_from(EllipseSpec.circle(O, 1), p)
        d, to_center = t1.z - p, -p
        assert (d.real * to_center.imag - d.imag * to_center.real) > 0

    @given(coord, coord, axis, axis, angle, st.floats(1.05, 4), angle)
    def test_double_root(self, x, y, a, b, th, rho, phi):
        e = EllipseSpec(PlanePoint(x, y), a, b, th)
        p = complex(e.from_local(rho * complex(math.cos(phi), math.sin(phi))))
        c = e.to_conic()
        for t in tangents_from(e, p):
            d = t.z - p
            # c(p + s d) = A2 s^2 + B1 s + C0
            f0 = c(p.real, p.imag)
            f1 = c(p.real + d.real, p.imag + d.imag)
            fm = c(p.real - d.real, p.imag - d.imag)
            A2, B1 = (f1 + fm) / 2 - f0, (f1 - fm) / 2
            assert abs(B1 * B1 - 4 * A2 * f0) < 1e-10


def test_normalize_angle():
    assert normalize_angle(math.pi) == pytest.approx(0.0, abs=1e-15)
    assert normalize_angle(-math.pi / 2) == pytest.approx(math.pi / 2)
    assert normalize_angle(0.3) == pytest.approx(0.3)
