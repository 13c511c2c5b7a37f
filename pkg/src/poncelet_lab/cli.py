"""Command-line front end: ``poncelet-lab <command> [options]``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for
configuration or admissibility errors.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import engine
from .exceptions import GeometryError, InadmissiblePair, InvalidConfig, IoFailure, PonceletError
from .report import FAMILY_PARAMS, PairSource, RunConfig, parse_complex, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

FAMILY_HELP = {
    "incircle": "outer (a, b), inner circle of radius ab/(a+b)",
    "circumcircle": "outer circle of radius R, caustic (ac, bc = R - ac)",
    "homothetic": "outer (a, b), caustic (a/2, b/2)",
    "confocal": "elliptic billiard (a, b) with its confocal caustic",
    "excentral": "excentral triangles of the (a, b) billiard",
    "concentric_tilted": "outer (a, b), tilted concentric caustic (ac, bc)",
    "blaschke": "outer (a, b) with caustic foci f, g given in the unit-disk frame",
    "random": "random nonconcentric Blaschke pair (seeded by PONCELET_SEED)",
}


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_argument_group("pair source")
    src.add_argument("--family", choices=sorted(FAMILY_PARAMS), help="named family")
    src.add_argument("--pair", metavar="FILE", help="pair-spec JSON file")
    for name in ("a", "b", "R", "ac", "bc"):
        src.add_argument(f"--{name}", type=float, default=None)
    src.add_argument("--f", default=None, help="focus f as 'x,y'")
    src.add_argument("--g", default=None, help="focus g as 'x,y'")
    p.add_argument("--samples", type=int, default=None, help="family samples n")
    p.add_argument("--tol", type=float, default=None, help="pass threshold")
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.add_argument("--csv", default=None, help="write locus / variance CSV here")
    p.add_argument("--svg", default=None, help="write an SVG figure here")
    p.add_argument("--grid", type=int, default=64, help="search grid size per axis")
    p.add_argument("--refine", action=argparse.BooleanOptionalAction, default=True,
                   help="Nelder-Mead refinement after the grid search")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poncelet-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="power-of-center invariance checks")
    _common(p)
    p.add_argument("--circle", action="append", help="circle kind (repeatable)")
    p.add_argument("--triangle", default=None, help="derived triangle to use instead of the reference")

    p = sub.add_parser("locus", help="sample, fit and compare center loci")
    _common(p)
    p.add_argument("--center", action="append", help="X<k>, gamma=<g> or combo=<alpha>,<beta>")

    p = sub.add_parser("search", help="stationary power points of generic pairs")
    _common(p)
    p.add_argument("--kind", action="append", choices=("circumcircle", "euler"))

    p = sub.add_parser("pencil", help="power invariance along the circumcircle/Euler pencil")
    _common(p)
    p.add_argument("--t", action="append", type=float, help="pencil parameter (repeatable)")

    p = sub.add_parser("render", help="draw a pair with sample triangles, circles and loci")
    _common(p)
    p.add_argument("--center", action="append", help="locus to draw (repeatable)")
    p.add_argument("--circle", action="append", help="circle of the first triangle to draw")
    p.add_argument("--triangles", type=int, default=3, help="number of sample triangles")

    p = sub.add_parser("families", help="list named families")
    p.add_argument("--list", action="store_true", help="list families and their parameters")
    return parser


def _source(args) -> PairSource:
    given = {k: getattr(args, k) for k in ("a", "b", "R", "ac", "bc", "f", "g")
             if getattr(args, k) is not None}
    if (args.family is None) == (args.pair is None):
        raise InvalidConfig("give exactly one of --family or --pair")
    if args.pair is not None:
        if given:
            raise InvalidConfig("family parameters cannot be combined with --pair")
        return PairSource.load(args.pair)
    if args.family == "blaschke":
        missing = {"a", "b", "f", "g"} - set(given)
        if missing:
            raise InvalidConfig(f"blaschke needs --{' --'.join(sorted(missing))}")
        return PairSource("blaschke", "blaschke", {"a": given["a"], "b": given["b"],
                                                   "f": parse_complex(given["f"]),
                                                   "g": parse_complex(given["g"])})
    if "f" in given or "g" in given:
        raise InvalidConfig("--f/--g apply only to --family blaschke")
    return PairSource("family", args.family, given)


def _env_seed() -> Optional[int]:
    env = os.environ.get("PONCELET_SEED")
    if env in (None, ""):
        return None
    try:
        return int(env)
    except ValueError as exc:
        raise InvalidConfig(f"PONCELET_SEED must be an integer, got {env!r}") from exc


def config_from_args(args) -> RunConfig:
    cmd = args.command
    cfg = RunConfig(cmd, _source(args), tol=args.tol, out=args.out, csv=args.csv, svg=args.svg,
                    grid=args.grid, refine=args.refine, seed=_env_seed())
    if args.samples is not None:
        cfg.samples = args.samples
    elif cmd == "locus":
        cfg.samples = 512
    elif cmd == "search":
        cfg.samples = 128
    if cmd == "verify":
        cfg.circles = tuple(args.circle or cfg.circles)
        cfg.triangle = args.triangle
    elif cmd == "locus":
        cfg.centers = tuple(args.center or cfg.centers)
    elif cmd == "search":
        cfg.kinds = tuple(args.kind or cfg.kinds)
    elif cmd == "pencil":
        cfg.ts = tuple(args.t) if args.t else cfg.ts
    elif cmd == "render":
        cfg.centers = tuple(args.center or ())
        cfg.draw_circles = tuple(args.circle or ())
        cfg.triangles = args.triangles
        if cfg.svg is None:
            cfg.svg = args.out
            cfg.out = None
        if cfg.svg is None:
            raise InvalidConfig("render needs --svg (or --out)")
    return cfg


def list_families(stream) -> None:
    for name in sorted(FAMILY_PARAMS):
        params = ", ".join(FAMILY_PARAMS[name]) or "-"
        print(f"{name:<18} [{params}]  {FAMILY_HELP[name]}", file=stream)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.command == "families":
        list_families(sys.stdout)
        return EXIT_OK
    try:
        cfg = config_from_args(args)
        rep = run_suite(cfg)
    except InadmissiblePair as exc:
        extra = f" (closure residual {exc.residual:.3g})" if exc.residual is not None else ""
        print(f"error: inadmissible pair: {exc}{extra}", file=sys.stderr)
        return EXIT_CONFIG
    except (InvalidConfig, GeometryError, IoFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PonceletError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}", file=sys.stderr)
    try:
        if cfg.out:
            rep.write(cfg.out)
        elif cfg.command != "render":
            sys.stdout.write(rep.to_json())
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
