"""Pair-spec files, run configuration and run reports."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import centers, conjectures, engine, invariants, loci
from .exceptions import DegenerateLocus, InadmissiblePair, InvalidConfig, NoMinimum
from .geometry import EllipseSpec, PlanePoint

COMMANDS = ("verify", "locus", "search", "pencil", "families", "render")
VERIFY_COMMANDS = ("verify", "locus", "search", "pencil")
MIN_SAMPLES = 8

DEFAULT_TOL = {
    "verify": 1e-7,
    "locus": 1e-6,
    "search": 1e-8,
    "pencil": 1e-7,
}

FAMILY_PARAMS = {
    "incircle": ("a", "b"),
    "circumcircle": ("R", "ac", "bc"),
    "homothetic": ("a", "b"),
    "confocal": ("a", "b"),
    "excentral": ("a", "b"),
    "concentric_tilted": ("a", "b", "ac", "bc"),
    "blaschke": ("a", "b", "f", "g"),
    "random": (),
}


def parse_complex(v) -> complex:
    """``[x, y]``, ``"x,y"``, a number or a complex literal."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidConfig(f"expected [x, y], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float, complex)):
        return complex(v)
    s = str(v).strip()
    if "," in s:
        x, y = s.split(",", 1)
        return complex(float(x), float(y))
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise InvalidConfig(f"cannot parse point {v!r}") from exc


@dataclass(frozen=True)
class PairSource:
    """Exactly one of: named family with params, explicit pair, Blaschke data."""

    kind: str  # "family" | "explicit" | "blaschke"
    family: Optional[str] = None
    params: dict = field(default_factory=dict)
    outer: Optional[dict] = None
    inner: Optional[dict] = None

    def to_dict(self) -> dict:
        if self.kind == "explicit":
            return {"outer": dict(self.outer), "inner": dict(self.inner)}
        if self.kind == "blaschke":
            p = self.params
            return {"blaschke": {"a": p["a"], "b": p["b"],
                                 "f": [p["f"].real, p["f"].imag], "g": [p["g"].real, p["g"].imag]}}
        return {"family": self.family, **self.params}

    @classmethod
    def from_dict(cls, d: dict) -> "PairSource":
        if not isinstance(d, dict):
            raise InvalidConfig("pair spec must be a JSON object")
        keys = {"outer", "family", "blaschke"} & set(d)
        if len(keys) != 1:
            raise InvalidConfig("pair spec needs exactly one of 'outer'/'inner', 'family', 'blaschke'")
        try:
            if "outer" in d:
                o, i = d["outer"], d["inner"]
                outer = {"a": float(o["a"]), "b": float(o["b"])}
                inner = {k: float(i.get(k, 0.0)) for k in ("xc", "yc", "ac", "bc", "theta")}
                if "ac" not in i or "bc" not in i:
                    raise KeyError("inner.ac / inner.bc")
                return cls("explicit", outer=outer, inner=inner)
            if "blaschke" in d:
                b = d["blaschke"]
                return cls("blaschke", "blaschke", {"a": float(b["a"]), "b": float(b["b"]),
                                                    "f": parse_complex(b["f"]), "g": parse_complex(b["g"])})
            fam = d["family"]
            rest = {k: v for k, v in d.items() if k != "family"}
            if fam == "blaschke":
                return cls("blaschke", "blaschke", {"a": float(rest["a"]), "b": float(rest["b"]),
                                                    "f": parse_complex(rest["f"]), "g": parse_complex(rest["g"])})
            if fam not in FAMILY_PARAMS:
                raise InvalidConfig(f"unknown family {fam!r}")
            return cls("family", fam, {k: float(v) for k, v in rest.items()})
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(f"malformed pair spec: {exc}") from exc

    @classmethod
    def load(cls, path) -> "PairSource":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise InvalidConfig(f"cannot read pair spec {path}: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"pair spec {path} is not valid JSON: {exc}") from exc

    def build(self, seed=None) -> engine.FamilyHandle:
        """Construct and admit the pair; closure failures raise InadmissiblePair."""
        if self.kind == "explicit":
            o, i = self.outer, self.inner
            try:
                outer = EllipseSpec(PlanePoint(0.0, 0.0), o["a"], o["b"], 0.0)
                inner = EllipseSpec(PlanePoint(i["xc"], i["yc"]), i["ac"], i["bc"], i["theta"])
                pair = engine.PairSpec(outer, inner)
            except ValueError as exc:
                raise InvalidConfig(str(exc)) from exc
            worst = max(engine.closure_check(pair, s).residual for s in (0.0, 1.1, 2.3))
            if worst >= 1e-9:
                raise InadmissiblePair(f"tangent-chord iteration misses by {worst:.3g}", residual=worst)
            return engine.handle_from_pair(pair)
        if self.kind == "blaschke":
            p = self.params
            a, b = p["a"], p["b"]
            if b > a:
                raise InvalidConfig("blaschke pairs need a >= b")
            return engine.generic_pair(a, b, p["f"], p["g"])
        if self.family == "random":
            return engine.random_generic_pair(engine.seeded_rng(seed))
        allowed = FAMILY_PARAMS[self.family]
        extra = set(self.params) - set(allowed)
        if extra:
            raise InvalidConfig(f"family {self.family} does not take {sorted(extra)}")
        try:
            return engine.build_named_pair(self.family, **self.params)
        except KeyError as exc:
            raise InvalidConfig(f"family {self.family} needs parameter {exc}") from exc


@dataclass
class RunConfig:
    command: str
    source: Optional[PairSource] = None
    samples: int = 256
    tol: Optional[float] = None
    out: Optional[str] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    grid: int = 64
    refine: bool = True
    centers: tuple = ("X3", "X5")
    circles: tuple = ("circumcircle", "euler")
    triangle: Optional[str] = None
    ts: tuple = (-1.0, 0.0, 0.5, 2 / 3, 1.0, 2.0, 5.0)
    kinds: tuple = ("circumcircle", "euler")
    seed: Optional[int] = None
    triangles: int = 3
    draw_circles: tuple = ()

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidConfig(f"unknown command {self.command!r}")
        if self.command in VERIFY_COMMANDS or self.command == "render":
            if self.source is None:
                raise InvalidConfig("a pair source (--family, --pair or --blaschke) is required")
        if self.command in VERIFY_COMMANDS and self.samples < MIN_SAMPLES:
            raise InvalidConfig(f"--samples must be at least {MIN_SAMPLES}")
        if self.tol is not None and not self.tol > 0:
            raise InvalidConfig("--tol must be positive")
        if self.grid < 2:
            raise InvalidConfig("--grid must be at least 2")
        for c in self.circles:
            if c not in centers.CIRCLES:
                raise InvalidConfig(f"unknown circle {c!r}")
        for label in self.centers:
            try:
                centers.CenterSpec.parse(label)
            except ValueError as exc:
                raise InvalidConfig(str(exc)) from exc
        for c in self.draw_circles:
            if c not in centers.CIRCLES:
                raise InvalidConfig(f"unknown circle {c!r}")
        if self.triangles < 0:
            raise InvalidConfig("--triangles must be nonnegative")
        if self.triangle is not None and self.triangle not in centers.DERIVED:
            raise InvalidConfig(f"unknown derived triangle {self.triangle!r}")

    @property
    def tolerance(self) -> float:
        return self.tol if self.tol is not None else DEFAULT_TOL.get(self.command, 1e-7)

    def to_dict(self) -> dict:
        d = {
            "command": self.command,
            "pair": self.source.to_dict() if self.source else None,
            "samples": self.samples,
            "tol": self.tolerance,
            "seed": self.seed,
        }
        extra = {
            "verify": {"circles": list(self.circles), "triangle": self.triangle},
            "locus": {"centers": list(self.centers)},
            "search": {"kinds": list(self.kinds), "grid": self.grid, "refine": self.refine},
            "pencil": {"t": list(self.ts)},
            "render": {"centers": list(self.centers), "circles": list(self.draw_circles),
                       "triangles": self.triangles},
        }
        d.update(extra.get(self.command, {}))
        return d


@dataclass
class Check:
    name: str
    passed: bool
    data: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, **self.data}


@dataclass
class RunReport:
    config: dict
    pair: Optional[dict] = None
    checks: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def n_pass(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def n_fail(self) -> int:
        return sum(not c.passed for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.n_fail == 0

    def to_dict(self) -> dict:
        """Stable field order; wall time is deliberately excluded."""
        return {
            "config": self.config,
            "pair": self.pair,
            "checks": [c.to_dict() for c in self.checks],
            "summary": {"pass": self.n_pass, "fail": self.n_fail},
            "verdict": "pass" if self.ok else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), indent=2) + "\n"

    def write(self, path) -> None:
        path = Path(path)
        path.write_text(self.to_json())
        sidecar = path.with_name(path.name + ".timing.json")
        sidecar.write_text(json.dumps({"wall_time_s": self.wall_time}) + "\n")


def _clean(x: Any):
    """JSON-safe copy: complex -> [re, im], NaN/inf -> None, numpy -> python."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return [_clean(float(x.real)), _clean(float(x.imag))]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def pair_summary(h: engine.FamilyHandle) -> dict:
    o, i = h.pair.outer, h.pair.inner
    return {
        "family": h.family,
        "outer": {"a": o.a, "b": o.b},
        "inner": {"xc": i.center.x, "yc": i.center.y, "ac": i.a, "bc": i.b, "theta": i.theta},
        "f": h.f,
        "g": h.g,
    }


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _run_verify(cfg: RunConfig, h, rep: RunReport) -> None:
    tol = cfg.tolerance
    for circ in cfg.circles:
        r = invariants.verify_invariant(h, circ, n=cfg.samples, threshold=tol, triangle_kind=cfg.triangle)
        passed = r.verdict == "invariant" and r.valid_fraction >= invariants.MIN_VALID_FRACTION
        if r.expected is not None:
            passed = passed and r.rel_error < tol
        rep.checks.append(Check(r.statistic, bool(passed), r.to_dict()))


def _run_locus(cfg: RunConfig, h, rep: RunReport, scene_loci: list) -> None:
    tol = cfg.tolerance
    lam = engine.family_lambdas(cfg.samples)
    csv_rows = []
    for label in cfg.centers:
        spec = centers.CenterSpec.parse(label)
        pts = loci.sample_locus(h, spec, cfg.samples)
        csv_rows += [(k, l.real, l.imag, z.real, z.imag) for k, l, z in zip(range(len(pts)), lam, pts)]
        data: dict = {"center": spec.label(), "valid": int(np.isfinite(pts).sum())}
        passed = True
        if loci.is_stationary(pts):
            z = pts[np.isfinite(pts)].mean()
            data.update(kind="point", point=z)
            scene_loci.append(pts)
        else:
            fit = loci.fit_conic(pts)
            data.update(kind=fit.kind, rms_residual=fit.rms_residual)
            if fit.ellipse is not None:
                e = fit.ellipse
                data["fit"] = {"center": list(e.center), "a": e.a, "b": e.b, "theta": e.theta}
            scene_loci.append(pts)
            co = spec.euler_coeffs
            if co is not None:
                pl = loci.predicted_locus(h, *co)
                resid = float(np.nanmax(np.abs(pts - pl(lam))))
                data["parametrization_residual"] = resid
                passed = resid < tol
                try:
                    pe = pl.ellipse
                    data["predicted"] = {"center": list(pe.center), "a": pe.a, "b": pe.b, "theta": pe.theta}
                    if fit.ellipse is not None:
                        dist = loci.ellipse_distance(fit.ellipse, pe)
                        data["discrepancy"] = dist
                        passed = passed and dist["center"] < tol and dist["axes"] < tol
                        if math.isfinite(dist["rotation"]):
                            passed = passed and dist["rotation"] < tol
                except DegenerateLocus as exc:
                    data["predicted"] = {"segment": True, "center": exc.center,
                                         "half_length": exc.half_length, "theta": exc.theta}
            else:
                passed = fit.kind == "ellipse"
        rep.checks.append(Check(f"locus[{spec.label()}]", bool(passed), data))
    if cfg.csv:
        write_csv(cfg.csv, ("lambda_index", "lambda_re", "lambda_im", "x", "y"), csv_rows)


def _run_search(cfg: RunConfig, h, rep: RunReport) -> list:
    tol = cfg.tolerance
    results = []
    for kind in cfg.kinds:
        try:
            r = conjectures.stationary_power_point(h, kind, grid_n=cfg.grid, refine=cfg.refine,
                                                   n=min(cfg.samples, 128))
        except NoMinimum as exc:
            rep.checks.append(Check(f"stationary[{kind}]", True, {"flat": True, "message": str(exc)}))
            continue
        results.append(r)
        passed = r.relspread_at_point < tol and r.relspread_at_point <= r.relspread_at_O
        rep.checks.append(Check(f"stationary[{kind}]", bool(passed), r.to_dict()))
    if cfg.csv and results:
        # one block per circle kind, in the order requested
        rows = [row for r in results for row in conjectures.variance_rows(r)]
        write_csv(cfg.csv, ("x", "y", "relspread"), rows)
    return results


def _run_pencil(cfg: RunConfig, h, rep: RunReport) -> None:
    tol = cfg.tolerance
    for r in conjectures.pencil_invariance_scan(h, cfg.ts, n=cfg.samples, threshold=tol):
        rep.checks.append(Check(r.statistic, r.verdict == "invariant", r.to_dict()))


def run_suite(cfg: RunConfig) -> RunReport:
    """Run one command; raises InvalidConfig / InadmissiblePair for exit code 2."""
    cfg.validate()
    t0 = time.perf_counter()
    rep = RunReport(_clean(cfg.to_dict()))
    if cfg.command == "families":
        rep.pair = None
        rep.checks = []
        rep.wall_time = time.perf_counter() - t0
        return rep
    h = cfg.source.build(cfg.seed)
    rep.pair = _clean(pair_summary(h))
    scene_loci: list = []
    if cfg.command == "verify":
        _run_verify(cfg, h, rep)
    elif cfg.command == "locus":
        _run_locus(cfg, h, rep, scene_loci)
    elif cfg.command == "search":
        _run_search(cfg, h, rep)
    elif cfg.command == "pencil":
        _run_pencil(cfg, h, rep)
    elif cfg.command == "render":
        for label in cfg.centers:
            scene_loci.append(loci.sample_locus(h, centers.CenterSpec.parse(label), cfg.samples))
    if cfg.svg:
        from .svg import Scene, render_svg

        tris = list(engine.family_vertices(h, 3 * cfg.triangles)[::3]) if cfg.triangles else []
        circles = [centers.named_circle(tris[0], c) for c in cfg.draw_circles] if tris else []
        render_svg(Scene(h.pair, tris, circles, scene_loci), cfg.svg)
    rep.wall_time = time.perf_counter() - t0
    return rep
