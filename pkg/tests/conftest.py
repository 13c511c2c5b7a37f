import numpy as np
import pytest
from hypothesis import settings

from poncelet_lab.engine import build_named_pair, generic_pair

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def generic():
    return generic_pair(1.5, 1.0, 0.3, 0.1 + 0.2j)


@pytest.fixture(scope="session")
def circum_generic():
    return generic_pair(1.0, 1.0, 0.3, 0.1 + 0.2j)


@pytest.fixture(scope="session")
def tilted():
    return build_named_pair("concentric_tilted", a=1.5, b=1.0, ac=0.8, bc=0.45)


@pytest.fixture(scope="session")
def confocal():
    return build_named_pair("confocal", a=2.0, b=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_triangles(rng, n, max_circumradius=10.0):
    """Gaussian vertices, redrawn until n unit-scale triangles are collected."""
    out = []
    while len(out) < n:
        T = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
        d1, d2 = T[:, 1] - T[:, 0], T[:, 2] - T[:, 0]
        area = 0.5 * np.abs(d1.real * d2.imag - d1.imag * d2.real)
        s = np.abs(np.roll(T, -1, 1) - np.roll(T, -2, 1))
        R = np.prod(s, axis=1) / np.maximum(4 * area, 1e-300)
        out.extend(T[(area > 1e-3) & (R < max_circumradius)])
    return np.array(out[:n])
