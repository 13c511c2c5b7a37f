"""Deterministic SVG rendering of a pair, sample triangles, circles and loci."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .engine import PairSpec
from .exceptions import IoFailure
from .geometry import EllipseSpec, SignedCircle

MARGIN = 1.2
ELLIPSE_SEGMENTS = 256

STYLE = {
    "axes": 'stroke="#bbbbbb" stroke-width="{w}"',
    "outer": 'fill="none" stroke="#000000" stroke-width="{w}"',
    "inner": 'fill="none" stroke="#1f77b4" stroke-width="{w}"',
    "triangle": 'fill="none" stroke="#d62728" stroke-width="{w}"',
    "circle": 'fill="none" stroke="#2ca02c" stroke-width="{w}" stroke-dasharray="{d}"',
    "locus": 'fill="none" stroke="#9467bd" stroke-width="{w}"',
}


@dataclass
class Scene:
    pair: Optional[PairSpec] = None
    triangles: Sequence = field(default_factory=list)
    circles: Sequence[SignedCircle] = field(default_factory=list)
    loci: Sequence = field(default_factory=list)  # point arrays or EllipseSpec


def _f(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _pt(z: complex) -> str:
    # SVG's y axis points down
    return f"{_f(z.real)},{_f(-z.imag)}"


def _ellipse_el(e: EllipseSpec, style: str) -> str:
    deg = -math.degrees(e.theta)
    return (f'<ellipse cx="{_f(e.center.x)}" cy="{_f(-e.center.y)}" rx="{_f(e.a)}" ry="{_f(e.b)}" '
            f'transform="rotate({_f(deg)} {_f(e.center.x)} {_f(-e.center.y)})" {style}/>')


def _path(points, closed: bool) -> str:
    z = np.asarray(points, dtype=complex)
    parts, pen = [], False
    for p in z:
        if not np.isfinite(p):
            pen = False
            continue
        parts.append(("L" if pen else "M") + _pt(p))
        pen = True
    if closed and parts and np.all(np.isfinite(z)):
        parts.append("Z")
    return " ".join(parts)


def svg_string(scene: Scene) -> str:
    if scene.pair is not None:
        a, b = scene.pair.outer.a, scene.pair.outer.b
    else:
        a = b = 1.0
    W, H = MARGIN * a, MARGIN * b
    w = _f(0.004 * max(a, b))
    st = {k: v.format(w=w, d=_f(0.02 * max(a, b))) for k, v in STYLE.items()}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_f(-W)} {_f(-H)} {_f(2 * W)} {_f(2 * H)}">',
        f'<g id="axes"><line x1="{_f(-W)}" y1="0.000000" x2="{_f(W)}" y2="0.000000" {st["axes"]}/>'
        f'<line x1="0.000000" y1="{_f(-H)}" x2="0.000000" y2="{_f(H)}" {st["axes"]}/></g>',
    ]
    if scene.pair is not None:
        out.append(f'<g id="outer">{_ellipse_el(scene.pair.outer, st["outer"])}</g>')
        out.append(f'<g id="inner">{_ellipse_el(scene.pair.inner, st["inner"])}</g>')
    tri = "".join(f'<polygon points="{" ".join(_pt(z) for z in np.asarray(t, dtype=complex))}" '
                  f'{st["triangle"]}/>' for t in scene.triangles)
    out.append(f'<g id="triangles">{tri}</g>')
    circ = "".join(f'<circle cx="{_f(c.center.x)}" cy="{_f(-c.center.y)}" r="{_f(c.radius)}" '
                   f'{st["circle"]}/>' for c in scene.circles if c.r2 >= 0)
    out.append(f'<g id="circles">{circ}</g>')
    paths = []
    for loc in scene.loci:
        if isinstance(loc, EllipseSpec):
            d = _path(loc.sample(ELLIPSE_SEGMENTS), True)
        else:
            d = _path(loc, True)
        if d:
            paths.append(f'<path d="{d}" {st["locus"]}/>')
    out.append(f'<g id="loci">{"".join(paths)}</g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(scene: Scene, path) -> Path:
    path = Path(path)
    try:
        path.write_text(svg_string(scene))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path
