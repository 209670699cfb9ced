"""Command line entry point.

Exit codes: 0 success, 2 usage error, 3 domain or feasibility error,
4 convergence or cross-check failure, 5 I/O failure.
"""
from __future__ import annotations

import argparse
import contextlib
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import serialize
from .analytic import DEFAULT_M_MAX, rho_surface
from .errors import HelixSRFError
from .helix import HelixParams
from .optimize import (
    DEFAULT_ALPHA_HI,
    DEFAULT_GRID,
    DEFAULT_TOL,
    ConjectureConfig,
    alpha_lattice,
    build_report,
    conjecture_report,
    grid_scan,
    is_interior,
    refine_local,
    refined_local_minima,
    solve_triple_point,
)
from .oracle import steiner_ratio_finite
from .region import BRACKET_ALPHA_MAX, in_compact_region, omega_window, unit_rho_curve

EXIT_IO = 5

SURFACE_HEADER = ("omega", "alpha", "m", "rho_m", "feasible")
REGION_HEADER = ("kind", "m", "omega", "alpha")


class UsageError(Exception):
    pass


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        a, b = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxM, got {text!r}")
    if a < 1 or b < 1:
        raise argparse.ArgumentTypeError(f"grid sizes must be positive, got {text!r}")
    return a, b


def _interval(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 <= lo <= hi):
        raise argparse.ArgumentTypeError(f"need finite 0 <= LO <= HI, got {text!r}")
    return lo, hi


def _m_values(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split(".."))
            values = list(range(lo, hi + 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M, M..N or M,N,..., got {text!r}")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"skip counts must be >= 1, got {text!r}")
    return values


def _positive_int(lo: int):
    def parse(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {v}")
        return v

    return parse


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (math.isfinite(v) and v > 0.0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return v


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


@dataclass
class RunConfig:
    command: str
    out: str | None
    format: str
    m_max: int
    threads: int
    options: argparse.Namespace


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # single machine-readable line, argparse's usage-error exit code
        self.exit(2, f"error: usage: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--m-max", type=_positive_int(5), default=DEFAULT_M_MAX,
                        help="largest skip class in the SRF (default 16)")
    common.add_argument("--threads", type=_positive_int(1), default=1)

    parser = _Parser(prog="helixsrf", description="Steiner ratio function of helical point sets")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("surface", parents=[common], help="rho_m on an (omega, alpha) lattice")
    p.add_argument("--m", type=_m_values, default=[1, 2, 3, 4, 5], help="e.g. 1..5 or 1,3")
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID, help="NxM lattice (omega x alpha)")
    p.add_argument("--omega", type=_interval, default=None, help="LO:HI (default: the omega window)")
    p.add_argument("--alpha", type=_interval, default=(0.0, DEFAULT_ALPHA_HI),
                   help="LO:HI; LO = 0 is treated as open")

    p = sub.add_parser("region", parents=[common], help="unit-rho curves and the omega window")
    p.add_argument("--m", type=_m_values, default=[1, 2, 3, 4, 5])
    p.add_argument("--n-omega", type=_positive_int(2), default=400)
    p.add_argument("--alpha-max", type=_positive_float, default=BRACKET_ALPHA_MAX)

    p = sub.add_parser("minimize", parents=[common], help="grid scan plus Nelder-Mead")
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    p.add_argument("--alpha-hi", type=_positive_float, default=DEFAULT_ALPHA_HI)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    p = sub.add_parser("triple", parents=[common], help="intersection of surfaces 1, 2, 3")
    p.add_argument("--omega", type=_positive_float, default=2.0, help="initial omega")
    p.add_argument("--alpha", type=_positive_float, default=0.3, help="initial alpha")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    p = sub.add_parser("conjecture", parents=[common], help="full minimum reproduction with cross-checks")
    p.add_argument("--grid", type=_grid, default=DEFAULT_GRID)
    p.add_argument("--alpha-hi", type=_positive_float, default=DEFAULT_ALPHA_HI)
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)

    p = sub.add_parser("verify", parents=[common], help="finite-n Steiner tree oracle")
    p.add_argument("--n", type=_positive_int(3), default=100)
    p.add_argument("--omega", type=_finite_float, required=True)
    p.add_argument("--alpha", type=_finite_float, required=True)
    p.add_argument("--tol", type=_positive_float, default=1e-12)
    return parser


def surface_rows(ms, grid, omega_range, alpha_range, m_max):
    n_omega, n_alpha = grid
    lo, hi = omega_range
    omegas = np.linspace(lo, hi, n_omega)
    a_lo, a_hi = alpha_range
    alphas = alpha_lattice(a_hi, n_alpha) if a_lo == 0.0 else np.linspace(a_lo, a_hi, n_alpha)
    params = [HelixParams(float(w), float(a)) for w in omegas for a in alphas]
    feasible = [in_compact_region(p, m_max).inside for p in params]
    for m in ms:
        for p, ok in zip(params, feasible):
            yield (p.omega, p.alpha, m, rho_surface(m, p) if ok else None, ok)


def region_rows(ms, n_omega, alpha_max):
    win = omega_window()
    yield ("window", None, win.lo, None)
    yield ("window", None, win.hi, None)
    for m in ms:
        for w in np.linspace(win.lo, win.hi, n_omega):
            for a in unit_rho_curve(m, float(w), alpha_max=alpha_max):
                yield ("unit_rho", m, float(w), a)


def _emit_table(header, rows, fmt, stream):
    if fmt == "json":
        stream.write(serialize.write_report([dict(zip(header, r)) for r in rows]))
    else:
        serialize.write_csv(header, rows, stream)


def run(cfg: RunConfig, stream) -> None:
    o = cfg.options
    if cfg.command == "surface":
        omega_range = o.omega or (omega_window().lo, omega_window().hi)
        if omega_range[0] <= 0.0:
            raise UsageError("omega range must be positive")
        rows = surface_rows(o.m, o.grid, omega_range, o.alpha, cfg.m_max)
        _emit_table(SURFACE_HEADER, rows, cfg.format, stream)
    elif cfg.command == "region":
        _emit_table(REGION_HEADER, region_rows(o.m, o.n_omega, o.alpha_max), cfg.format, stream)
    elif cfg.command == "minimize":
        scan = grid_scan(alpha_hi=o.alpha_hi, resolution=o.grid, m_max=cfg.m_max, threads=cfg.threads)
        report = refine_local(scan.incumbent, o.tol, cfg.m_max)
        report.grid_resolution = list(o.grid)
        out = serialize.to_jsonable(report)
        out["grid_omega"], out["grid_alpha"] = scan.incumbent.omega, scan.incumbent.alpha
        out["local_minima"] = [list(t) for t in refined_local_minima(scan, cfg.m_max)]
        stream.write(serialize.write_report(out))
    elif cfg.command == "triple":
        tp = solve_triple_point(HelixParams(o.omega, o.alpha))
        report = build_report(
            tp.params, cfg.m_max,
            interior=is_interior(tp.params, 10.0 * o.tol, cfg.m_max),
            evaluations=tp.iterations,
        )
        out = serialize.to_jsonable(report)
        out["residual"] = tp.residual
        stream.write(serialize.write_report(out))
    elif cfg.command == "conjecture":
        rep = conjecture_report(ConjectureConfig(
            grid=o.grid, alpha_hi=o.alpha_hi, m_max=cfg.m_max, tol=o.tol, threads=cfg.threads,
        ))
        stream.write(serialize.write_report(rep.as_dict()))
    elif cfg.command == "verify":
        rep = steiner_ratio_finite(o.n, HelixParams(o.omega, o.alpha), tol=o.tol)
        stream.write(serialize.write_report(rep))
        if rep.angle_step_mean is not None:
            print(
                f"info: middle-third Steiner angular step / omega: mean {rep.angle_step_mean:.12f}, "
                f"spread {rep.angle_step_spread:.3g}",
                file=sys.stderr,
            )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: --help exits 0, usage errors 2
        return int(exc.code or 0)
    table = ns.command in ("surface", "region")
    fmt = ns.format or ("csv" if table else "json")
    if not table and fmt != "json":
        print(f"error: usage: {ns.command} writes JSON only", file=sys.stderr)
        return 2
    cfg = RunConfig(ns.command, ns.out, fmt, ns.m_max, ns.threads, ns)

    try:
        if cfg.out:
            ctx = open(cfg.out, "w", encoding="utf-8", newline="")
        else:
            ctx = contextlib.nullcontext(sys.stdout)
        with ctx as stream:
            run(cfg, stream)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except HelixSRFError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
