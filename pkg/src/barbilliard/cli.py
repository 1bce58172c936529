"""Command line front end: rho, sweep, tau, render, verify.

Outputs are deterministic: floats are formatted to 12 significant
digits, CSV rows are emitted in t-major r-minor order regardless of the
worker count, and SVG bytes depend only on the inputs.

Exit codes: 0 ok, 2 invalid input, 3 I/O failure, 4 internal invariant
breach.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BarBilliardError,
    CoincidentPoints,
    InvalidBody,
    InvalidRational,
    NotInArc,
    OutOfRange,
    PointOnLine,
    PreconditionFailed,
)
from .geometry import DiskPoint, IdealPoint, Triangle, delta_n, foot_and_delta, hyp_distance
from .pentagram import (
    conjecture_check,
    detect_period5,
    tau_n,
    triangle_map,
)
from .svgfig import figure_svg, fmt


def _round12(x: float) -> float:
    return float(fmt(x))


class CliError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = 2):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


def _emit_error(err: CliError) -> int:
    print(json.dumps({"error": err.code, "message": str(err)}, sort_keys=True))
    return err.exit_code


def _triangle_from_args(args) -> tuple[Triangle, Optional[float], Optional[float]]:
    if args.vertices is not None:
        vals = [float(v) for v in args.vertices.split(",")]
        if len(vals) != 6:
            raise CliError("InvalidArgument", "--vertices needs x1,y1,x2,y2,x3,y3")
        pts = [DiskPoint(vals[0], vals[1]), DiskPoint(vals[2], vals[3]),
               DiskPoint(vals[4], vals[5])]
        return Triangle(*pts), None, None
    if args.t is None or args.r is None:
        raise CliError("InvalidArgument", "give either --vertices or both --t and --r")
    t, r = args.t, args.r
    if not 0.0 < t < 1.0:
        raise CliError("InvalidArgument", f"--t must be in (0, 1), got {t}")
    tri = Triangle(DiskPoint(0.0, t), DiskPoint(0.0, -t), DiskPoint(r, 0.0))
    return tri, t, r


def _rotation_dict(rotation) -> dict:
    cert = rotation.certificate
    comp = rotation.comparison
    return {
        "rho_estimate": _round12(rotation.estimate),
        "n_iters": rotation.n_iters,
        "error_bound": _round12(rotation.error_bound),
        "rho_p": cert.p if cert else None,
        "rho_q": cert.q if cert else None,
        "certificate_kind": cert.kind if cert else "uncertified",
        "witness_x": _round12(cert.witness_x) if cert else None,
        "residual": _round12(cert.residual) if cert else None,
        "comparison": (
            {"p": comp.p, "q": comp.q, "relation": comp.relation} if comp else None
        ),
    }


def _report_dict(report) -> dict:
    return {
        "cond48": report.two_fifths_sandwich,
        "cond53": report.all_strictly_inside,
        "one_third": report.one_third,
        "isosceles_above": report.isosceles_above,
        "isosceles_below": report.isosceles_below,
        "labelings": [
            {
                "pair": list(l.pair),
                "apex": l.apex,
                "d_base": _round12(l.d_base),
                "delta": _round12(l.delta),
                "delta1": _round12(l.delta1),
                "delta2": _round12(l.delta2),
                "half_delta1": _round12(l.half_delta1),
                "sandwich": l.sandwich,
                "orientation": l.orientation,
                "one_third": l.one_third,
                "strict_inside": l.strict_inside,
                "isosceles": l.isosceles,
            }
            for l in report.labelings
        ],
    }


def cmd_rho(args) -> int:
    tri, t, r = _triangle_from_args(args)
    verdict = conjecture_check(tri, n=args.iters, q_max=args.qmax)
    out = {
        "triangle": [[_round12(v.x), _round12(v.y)] for v in tri.vertices],
        "t": _round12(t) if t is not None else None,
        "r": _round12(r) if r is not None else None,
        "condition_report": _report_dict(verdict.report),
        "rotation": _rotation_dict(verdict.rotation),
        "condition": verdict.condition,
        "rho_verdict": verdict.rho_verdict,
        "consistent": verdict.consistent,
    }
    cert = verdict.rotation.certificate
    if cert is not None and (cert.p, cert.q) == (2, 5):
        orbits = detect_period5(triangle_map(tri))
        out["orbits"] = [
            [_round12(p.angle) for p in pent.points] for pent in orbits.orbits
        ]
        out["zero_count"] = orbits.zero_count
    print(json.dumps(out, sort_keys=True))
    return 0


@dataclass(frozen=True)
class SweepSpec:
    """Grid description for a (t, r) family sweep."""

    t_lo: float
    t_hi: float
    t_steps: int
    r_lo: float
    r_hi: float
    r_steps: int
    r_mode: str  # "absolute" | "relative_interval"
    iters: int
    q_max: int
    seed: Optional[int]

    def __post_init__(self):
        if not 0.0 < self.t_lo <= self.t_hi < 1.0:
            raise CliError("InvalidArgument", "t range must satisfy 0 < lo <= hi < 1")
        if self.t_steps < 1 or self.r_steps < 1:
            raise CliError("InvalidArgument", "grid steps must be >= 1")
        if self.iters < 1000:
            raise CliError("InvalidArgument", "sweep needs --iters >= 1000")
        if self.r_mode not in ("absolute", "relative_interval"):
            raise CliError("InvalidArgument", f"unknown r mode {self.r_mode!r}")


#: CSV schema, fixed: downstream tooling parses this exact header
CSV_HEADER = (
    "t,r,d_pq,delta,delta2,half_delta1,cond48,cond53,"
    "rho_estimate,rho_p,rho_q,certificate_kind,consistent"
)


@dataclass(frozen=True)
class ReportRow:
    t: float
    r: float
    d_pq: float
    delta: float
    delta2: float
    half_delta1: float
    cond48: bool
    cond53: bool
    rho_estimate: float
    rho_p: Optional[int]
    rho_q: Optional[int]
    certificate_kind: str
    consistent: bool

    def to_csv(self) -> str:
        return ",".join(
            [
                fmt(self.t),
                fmt(self.r),
                fmt(self.d_pq),
                fmt(self.delta),
                fmt(self.delta2),
                fmt(self.half_delta1),
                "true" if self.cond48 else "false",
                "true" if self.cond53 else "false",
                fmt(self.rho_estimate),
                "" if self.rho_p is None else str(self.rho_p),
                "" if self.rho_q is None else str(self.rho_q),
                self.certificate_kind,
                "true" if self.consistent else "false",
            ]
        )


def _sweep_cell(cell: tuple[float, float, int, int]) -> ReportRow:
    t, r, iters, q_max = cell
    p = DiskPoint(0.0, t)
    q = DiskPoint(0.0, -t)
    apex = DiskPoint(r, 0.0)
    tri = Triangle(p, q, apex)
    verdict = conjecture_check(tri, n=iters, q_max=q_max)
    d_pq = hyp_distance(p, q)
    _, delta = foot_and_delta(p, q, apex)
    cert = verdict.rotation.certificate
    return ReportRow(
        t=t,
        r=r,
        d_pq=d_pq,
        delta=delta,
        delta2=delta_n(d_pq, 2),
        half_delta1=0.5 * delta_n(d_pq, 1),
        cond48=verdict.report.two_fifths_sandwich,
        cond53=verdict.report.all_strictly_inside,
        rho_estimate=verdict.rotation.estimate,
        rho_p=cert.p if cert else None,
        rho_q=cert.q if cert else None,
        certificate_kind=cert.kind if cert else "uncertified",
        consistent=verdict.consistent,
    )


def _grid_values(lo: float, hi: float, steps: int, jitter: Optional[np.ndarray]) -> list[float]:
    if jitter is None:
        if steps == 1:
            return [lo]
        return [lo + i * (hi - lo) / (steps - 1) for i in range(steps)]
    return [lo + (i + jitter[i]) * (hi - lo) / steps for i in range(steps)]


def _relative_radius(t: float, frac: float) -> float:
    d = hyp_distance(DiskPoint(0.0, t), DiskPoint(0.0, -t))
    x_inner = math.tanh(delta_n(d, 2))
    x_half = math.tanh(0.5 * delta_n(d, 1))
    return x_inner + frac * (x_half - x_inner)


def cmd_sweep(args) -> int:
    t_lo, t_hi, t_steps = _parse_range(args.t_range, "--t")
    r_lo, r_hi, r_steps = _parse_range(args.r_range, "--r")
    if args.grid:
        try:
            a, b = args.grid.lower().split("x")
            t_steps, r_steps = int(a), int(b)
        except ValueError as exc:
            raise CliError("InvalidArgument", "--grid must look like 20x20") from exc
    spec = SweepSpec(
        t_lo=t_lo, t_hi=t_hi, t_steps=t_steps,
        r_lo=r_lo, r_hi=r_hi, r_steps=r_steps,
        r_mode=args.r_mode, iters=args.iters, q_max=args.qmax, seed=args.seed,
    )

    if spec.seed is not None:
        rng = np.random.default_rng(spec.seed)
        t_jit = rng.random(spec.t_steps)
        r_jit = rng.random(spec.r_steps)
    else:
        t_jit = r_jit = None
    ts = _grid_values(spec.t_lo, spec.t_hi, spec.t_steps, t_jit)
    rs = _grid_values(spec.r_lo, spec.r_hi, spec.r_steps, r_jit)

    cells = []
    for t in ts:
        for rv in rs:
            if spec.r_mode == "relative_interval":
                r = -_relative_radius(t, rv)
            else:
                r = rv
            cells.append((t, r, spec.iters, spec.q_max))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=8))
    else:
        rows = [_sweep_cell(c) for c in cells]

    lines = [CSV_HEADER] + [row.to_csv() for row in rows]
    payload = "\n".join(lines) + "\n"
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(payload)
    except OSError as exc:
        raise CliError("IOFailure", f"cannot write {args.out}: {exc}", exit_code=3) from exc

    n_cons = sum(1 for r in rows if r.consistent)
    n_uncert = sum(1 for r in rows if r.certificate_kind == "uncertified" and not r.consistent)
    n_incons = len(rows) - n_cons - n_uncert
    print(f"rows={len(rows)} consistent={n_cons} inconsistent={n_incons} uncertified={n_uncert}")
    return 0


def _parse_range(text: Optional[str], flag: str) -> tuple[float, float, int]:
    if text is None:
        raise CliError("InvalidArgument", f"{flag} range is required (lo:hi[:steps])")
    parts = text.split(":")
    if len(parts) == 2:
        lo, hi = float(parts[0]), float(parts[1])
        return lo, hi, 10
    if len(parts) == 3:
        return float(parts[0]), float(parts[1]), int(parts[2])
    raise CliError("InvalidArgument", f"{flag} must look like lo:hi or lo:hi:steps")


def cmd_tau(args) -> int:
    vals = [float(v) for v in args.pair.split(",")]
    if len(vals) != 4:
        raise CliError("InvalidArgument", "--pair needs x1,y1,x2,y2")
    pv = [float(v) for v in args.point.split(",")]
    if len(pv) != 2:
        raise CliError("InvalidArgument", "--point needs x,y")
    result = tau_n(
        DiskPoint(vals[0], vals[1]),
        DiskPoint(vals[2], vals[3]),
        DiskPoint(pv[0], pv[1]),
        args.n,
    )
    print(
        json.dumps(
            {
                "n": result.n,
                "count": result.count,
                "roots": [_round12(p.angle) for p in result.roots],
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_render(args) -> int:
    tri, _, _ = _triangle_from_args(args)
    if args.steps < 0 or args.steps > 10_000:
        raise CliError("InvalidArgument", "--steps must be in [0, 10000]")
    tmap = triangle_map(tri)
    orbits = detect_period5(tmap).orbits
    svg = figure_svg(tmap, args.steps, IdealPoint(args.start), orbits)
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(svg)
    except OSError as exc:
        raise CliError("IOFailure", f"cannot write {args.out}: {exc}", exit_code=3) from exc
    return 0


def cmd_verify(args) -> int:
    tri, t, r = _triangle_from_args(args)
    verdict = conjecture_check(tri, n=args.iters, q_max=args.qmax)
    print(
        json.dumps(
            {
                "condition": verdict.condition,
                "rho_verdict": verdict.rho_verdict,
                "consistent": verdict.consistent,
                "condition_report": _report_dict(verdict.report),
                "rotation": _rotation_dict(verdict.rotation),
            },
            sort_keys=True,
        )
    )
    return 0


def _add_triangle_flags(sub) -> None:
    sub.add_argument("--t", type=float, default=None, help="base half-height in (0,1)")
    sub.add_argument("--r", type=float, default=None, help="apex abscissa (nonzero)")
    sub.add_argument("--vertices", type=str, default=None,
                     help="x1,y1,x2,y2,x3,y3 triangle vertices")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barbilliard",
        description="Bar-billiard circle maps: rotation numbers and pentagram analysis",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_rho = subs.add_parser("rho", help="analyze one triangle (JSON report)")
    _add_triangle_flags(p_rho)
    p_rho.add_argument("--iters", type=int, default=100_000)
    p_rho.add_argument("--qmax", type=int, default=64)
    p_rho.set_defaults(func=cmd_rho)

    p_sweep = subs.add_parser("sweep", help="sweep the (t, r) family to CSV")
    p_sweep.add_argument("--t", dest="t_range", type=str, default=None,
                         help="t range lo:hi[:steps]")
    p_sweep.add_argument("--r", dest="r_range", type=str, default=None,
                         help="r range lo:hi[:steps] (abscissa or interval fraction)")
    p_sweep.add_argument("--grid", type=str, default=None, help="TxR step counts")
    p_sweep.add_argument("--r-mode", type=str, default="absolute",
                         choices=("absolute", "relative_interval"))
    p_sweep.add_argument("--iters", type=int, default=2000)
    p_sweep.add_argument("--qmax", type=int, default=64)
    p_sweep.add_argument("--seed", type=int, default=None, help="jitter seed")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", type=str, required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_tau = subs.add_parser("tau", help="chord-incidence count for a segment map")
    p_tau.add_argument("--pair", type=str, required=True, help="x1,y1,x2,y2")
    p_tau.add_argument("--point", type=str, required=True, help="x,y")
    p_tau.add_argument("--n", type=int, default=2)
    p_tau.set_defaults(func=cmd_tau)

    p_render = subs.add_parser("render", help="SVG figure of a triangle system")
    _add_triangle_flags(p_render)
    p_render.add_argument("--steps", type=int, default=0, help="trajectory chords")
    p_render.add_argument("--start", type=float, default=0.0,
                          help="trajectory start angle in turns")
    p_render.add_argument("--out", type=str, required=True)
    p_render.set_defaults(func=cmd_render)

    p_verify = subs.add_parser("verify", help="condition vs rotation number verdict")
    _add_triangle_flags(p_verify)
    p_verify.add_argument("--iters", type=int, default=100_000)
    p_verify.add_argument("--qmax", type=int, default=64)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        return _emit_error(err)
    except (InvalidBody, CoincidentPoints) as err:
        return _emit_error(CliError("DegenerateBody", str(err)))
    except (OutOfRange, InvalidRational, PointOnLine, NotInArc, PreconditionFailed) as err:
        return _emit_error(CliError(type(err).__name__, str(err)))
    except OSError as err:
        return _emit_error(CliError("IOFailure", str(err), exit_code=3))
    except (BarBilliardError, RuntimeError) as err:
        return _emit_error(CliError(type(err).__name__, str(err), exit_code=4))


if __name__ == "__main__":
    sys.exit(main())
