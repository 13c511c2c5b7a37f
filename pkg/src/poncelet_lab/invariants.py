"""Power of a fixed point against family circles, and the known closed forms."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .centers import circle_params, derived_triangle, is_right
from .engine import FamilyHandle, build_named_pair, delta, family_vertices
from .exceptions import UnsupportedCombo, UnsupportedFamily
from .geometry import as_complex

DEFAULT_N = 256
DEFAULT_THRESHOLD = 1e-7
MIN_VALID_FRACTION = 0.9


def relspread(values) -> float:
    """(max - min) / max(|mean|, 1e-9) over the finite entries."""
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return float("nan")
    return float((v.max() - v.min()) / max(abs(v.mean()), 1e-9))


@dataclass
class InvarianceReport:
    statistic: str
    n: int
    valid: int
    mean: float
    relspread: float
    threshold: float = DEFAULT_THRESHOLD
    expected: Optional[float] = None
    abs_error: Optional[float] = None
    notes: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "invariant" if self.relspread < self.threshold else "variable"

    @property
    def valid_fraction(self) -> float:
        return self.valid / self.n if self.n else 0.0

    @property
    def rel_error(self) -> Optional[float]:
        if self.expected is None:
            return None
        return self.abs_error / max(abs(self.expected), 1e-300)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def family_triangles(h: FamilyHandle, n: int, triangle_kind: Optional[str] = None):
    """Vertices (n, 3) plus a validity mask; invalid derived samples are NaN."""
    V = family_vertices(h, n)
    valid = np.ones(n, dtype=bool)
    if triangle_kind is None or triangle_kind == "reference":
        return V, valid
    if triangle_kind in ("orthic", "tangential"):
        valid = ~is_right(V, 1e-9)
    out = np.full_like(V, np.nan)
    if valid.any():
        out[valid] = derived_triangle(V[valid], triangle_kind)
    return out, valid


def power_series(h: FamilyHandle, kind: str, base=0j, n: int = DEFAULT_N,
                 triangle_kind: Optional[str] = None) -> np.ndarray:
    """Power of ``base`` w.r.t. circle ``kind`` of each sampled triangle.

    Samples whose derived triangle or circle is undefined come back as NaN.
    """
    T, valid = family_triangles(h, n, triangle_kind)
    z = as_complex(base)
    out = np.full(n, np.nan)
    if kind == "tangential" and valid.any():
        idx = np.flatnonzero(valid)
        valid[idx[is_right(T[idx], 1e-9)]] = False
    if valid.any():
        c, r2 = circle_params(T[valid], kind)
        out[valid] = np.abs(z - c) ** 2 - r2
    return out


def confocal_constants(a: float, b: float) -> dict:
    """delta, caustic axes, h and the semiperimeter squared of the billiard."""
    d = delta(a, b)
    c2 = a * a - b * b
    ac, bc = a * (d - b * b) / c2, b * (a * a - d) / c2
    h = (-a * a - b * b + 2 * d) / c2
    s2 = a * a * (3 - h) * (3 + h) ** 2 / (4 * (1 + h))
    return {"delta": d, "ac": ac, "bc": bc, "h": h, "s2": s2}


def confocal_p5_readings(a: float, b: float) -> dict:
    """The Euler-circle power of the billiard center under three readings.

    ``h_form`` is the sidelength-parametrized result; ``direct`` uses
    mu = a/ac, eta = b/bc; ``reciprocal`` uses mu = ac/a, eta = bc/b.
    """
    k = confocal_constants(a, b)
    d, h, s2 = k["delta"], k["h"], k["s2"]

    def table(mu, eta):
        return d * mu * eta * (mu * mu + eta * eta - 2) / (mu * mu + eta * eta + 1)

    return {
        "h_form": -(3 - h * h) * (1 - h * h) * s2 / (9 - h * h) ** 2,
        "direct": table(a / k["ac"], b / k["bc"]),
        "reciprocal": table(k["ac"] / a, k["bc"] / b),
    }


def shear_frame(pair) -> tuple:
    """(a', b', c', ac, bc) with the caustic axis-aligned and the outer ellipse
    written as (b'^2 + c'^2) x^2 - 2 a' c' xy + a'^2 y^2 = a'^2 b'^2."""
    a, b = pair.outer.a, pair.outer.b
    th = pair.inner.theta
    ct, st = math.cos(th), math.sin(th)
    A = ct * ct / a**2 + st * st / b**2
    B = 2 * ct * st * (1 / b**2 - 1 / a**2)
    C = st * st / a**2 + ct * ct / b**2
    bs = 1 / math.sqrt(C)
    as_ = math.sqrt(4 * C / (4 * A * C - B * B))
    cs = -B * as_ * bs * bs / 2
    return as_, bs, cs, pair.inner.a, pair.inner.b


def concentric_powers(pair) -> tuple[float, float]:
    """Closed-form (P3, P5) of the center for any admissible concentric pair."""
    if not pair.is_concentric:
        raise UnsupportedCombo("closed forms exist only for concentric pairs")
    a, b, _, ac, bc = shear_frame(pair)
    k = a * bc / (b * ac) * (b * b + ac * ac - bc * bc)
    return -k - (ac * ac - bc * bc), -k / 2 + bc * bc


def expected_power(family: str, params: dict, circle: str) -> float:
    """Closed-form power of the common center for a named family."""
    p = params
    if family == "dual":
        raise UnsupportedFamily("the 'Dual' family is not defined")
    if family == "incircle":
        a, b = p["a"], p["b"]
        table = {"circumcircle": -a * b,
                 "euler": -a * b * (a * a + b * b) / (2 * (a + b) ** 2)}
    elif family == "circumcircle":
        R, ac = p["R"], p["ac"]
        bc = p.get("bc", R - ac)
        table = {"circumcircle": -R * R, "euler": -ac * bc}
    elif family == "homothetic":
        a, b = p["a"], p["b"]
        table = {"circumcircle": -(a * a + b * b) / 2, "euler": -(a * a + b * b) / 8,
                 "anticomplementary": -2 * (a * a + b * b)}
    elif family == "confocal":
        a, b = p["a"], p["b"]
        k = confocal_constants(a, b)
        d, h = k["delta"], k["h"]
        big = a * a + b * b + 2 * d
        table = {"circumcircle": -d,
                 "euler": confocal_p5_readings(a, b)["h_form"],
                 "bevan": -big,
                 "spieker": -(1 - h * h) ** 2 * big / 64,
                 "mandart": -(-h**4 + 14 * h * h + 3) * big / 48}
    elif family == "excentral":
        a, b = p["a"], p["b"]
        d = delta(a, b)
        table = {"circumcircle": -a * a - b * b - 2 * d, "euler": -d}
    elif family == "concentric_tilted":
        h = build_named_pair(family, **{k: p[k] for k in ("a", "b", "ac", "bc")})
        P3, P5 = concentric_powers(h.pair)
        table = {"circumcircle": P3, "euler": P5}
    else:
        raise UnsupportedCombo(f"no closed form for family {family!r}")
    if circle not in table:
        raise UnsupportedCombo(f"no closed form for {family} / {circle}")
    return float(table[circle])


def expected_power_for(h: FamilyHandle, circle: str) -> float:
    if h.family in (None, "blaschke"):
        if h.pair.is_concentric and circle in ("circumcircle", "euler"):
            return concentric_powers(h.pair)[0 if circle == "circumcircle" else 1]
        raise UnsupportedCombo("no closed form for a generic pair")
    return expected_power(h.family, h.params, circle)


def verify_invariant(h: FamilyHandle, kind: str, base=0j, expected: Optional[float] = None,
                     n: int = DEFAULT_N, threshold: float = DEFAULT_THRESHOLD,
                     triangle_kind: Optional[str] = None, lookup: bool = True) -> InvarianceReport:
    vals = power_series(h, kind, base, n, triangle_kind)
    ok = np.isfinite(vals)
    if expected is None and lookup and triangle_kind is None and as_complex(base) == 0:
        try:
            expected = expected_power_for(h, kind)
        except UnsupportedCombo:
            expected = None
    mean = float(vals[ok].mean()) if ok.any() else float("nan")
    name = kind if triangle_kind is None else f"{triangle_kind}/{kind}"
    rep = InvarianceReport(f"power[{name}]", n, int(ok.sum()), mean, relspread(vals), threshold)
    if expected is not None:
        rep.expected = float(expected)
        rep.abs_error = abs(mean - expected)
    if h.family == "confocal" and kind == "euler" and triangle_kind is None:
        rep.notes["confocal_p5_readings"] = confocal_p5_readings(h.params["a"], h.params["b"])
    return rep


DERIVED_ROWS = (
    ("confocal", "extouch", "euler"),
    ("incircle", "intouch", "euler"),
    ("homothetic", "medial", "euler"),
    ("circumcircle", "euler_triangle", "euler"),
    ("circumcircle", "orthic", "incircle"),
)

DERIVED_ROW_PARAMS = {
    "confocal": {"a": 2.0, "b": 1.0},
    "incircle": {"a": 1.5, "b": 1.0},
    "homothetic": {"a": 2.0, "b": 1.0},
    "circumcircle": {"R": 1.0, "ac": 0.6},
}


def table4_suite(selection=None, n: int = DEFAULT_N, params: Optional[dict] = None,
                 threshold: float = DEFAULT_THRESHOLD) -> list:
    """Power of the center for the extra family / derived triangle / circle rows."""
    rows = DERIVED_ROWS if selection is None else selection
    params = {**DERIVED_ROW_PARAMS, **(params or {})}
    out = []
    for fam, tri, circ in rows:
        if fam.lower() == "dual":
            raise UnsupportedFamily("derived-triangle rows on the 'Dual' family are not supported")
        h = build_named_pair(fam, **params[fam])
        rep = verify_invariant(h, circ, 0j, None, n, threshold, tri, lookup=False)
        rep.statistic = f"{fam}/{tri}/{circ}"
        out.append(rep)
    return out


def valid_row(rep: InvarianceReport) -> bool:
    return rep.valid_fraction >= MIN_VALID_FRACTION
