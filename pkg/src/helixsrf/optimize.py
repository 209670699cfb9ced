"""Global minimisation of the SRF over the compact region.

Two independent routes reach the candidate minimum:

* free minimisation: lattice scan of the masked region, then Nelder-Mead with a
  feasibility barrier from the best lattice point;
* algebra: damped Newton on ``d_1^2 = d_2^2 = d_3^2`` (three surfaces meeting).

:func:`conjecture_report` runs both and refuses to report unless they agree.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import minimum_filter
from scipy.optimize import minimize

from .analytic import (
    ALPHA_R,
    DEFAULT_M_MAX,
    GRAHAM_HWANG,
    OMEGA_R,
    RHO_CONJECTURE,
    rho_surface,
    srf,
    step_distance,
    symmetry_image,
)
from .errors import CrossCheckFailure, DegenerateRoot, DomainError, EmptyFeasibleSet, NonConvergence, SpecError
from .helix import HelixParams
from .region import OmegaWindow, in_compact_region, omega_window, region_mask

log = logging.getLogger(__name__)

DEFAULT_GRID = (400, 400)
DEFAULT_ALPHA_HI = 2.0
DEFAULT_TOL = 1e-12
DEFAULT_BUDGET = 100_000


@dataclass
class GridScan:
    omegas: np.ndarray
    alphas: np.ndarray
    rho: np.ndarray  # (n_omega, n_alpha), NaN where undefined
    mask: np.ndarray  # region membership
    incumbent: HelixParams
    incumbent_rho: float
    local_minima: list[tuple[float, float, float]] = field(default_factory=list)

    @property
    def spacing(self) -> tuple[float, float]:
        return (float(self.omegas[1] - self.omegas[0]), float(self.alphas[1] - self.alphas[0]))


def alpha_lattice(alpha_hi: float, n: int) -> np.ndarray:
    """``n`` equispaced alphas on (0, alpha_hi], excluding zero."""
    return alpha_hi * np.arange(1, n + 1) / n


def grid_scan(
    window: OmegaWindow | None = None,
    alpha_hi: float = DEFAULT_ALPHA_HI,
    resolution: tuple[int, int] = DEFAULT_GRID,
    m_max: int = DEFAULT_M_MAX,
    threads: int = 1,
) -> GridScan:
    n_omega, n_alpha = resolution
    if n_omega < 64 or n_alpha < 64:
        raise SpecError(f"grid resolution must be at least 64x64, got {n_omega}x{n_alpha}")
    if not alpha_hi > 0.0:
        raise SpecError(f"alpha upper bound must be positive, got {alpha_hi}")
    window = window or omega_window()
    omegas = np.linspace(window.lo, window.hi, n_omega)
    alphas = alpha_lattice(alpha_hi, n_alpha)

    def rows(chunk):
        return region_mask(omegas[chunk, None], alphas[None, :], m_max)

    chunks = np.array_split(np.arange(n_omega), max(threads, 1))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(rows, chunks))
    else:
        parts = [rows(c) for c in chunks]
    mask = np.concatenate([m for m, _ in parts])
    rho = np.concatenate([r for _, r in parts])

    if not mask.any():
        raise EmptyFeasibleSet(
            f"no lattice point of {n_omega}x{n_alpha} over alpha in (0, {alpha_hi}] is feasible"
        )
    masked = np.where(mask, rho, np.inf)
    i, j = np.unravel_index(np.argmin(masked), masked.shape)  # first in lattice order
    incumbent = HelixParams(float(omegas[i]), float(alphas[j]))

    # lattice local minima away from the region boundary
    inner = minimum_filter(mask, size=3, mode="constant", cval=False)
    lm = (masked == minimum_filter(masked, size=3, mode="constant", cval=np.inf)) & inner
    minima = sorted(
        (float(masked[a, b]), float(omegas[a]), float(alphas[b])) for a, b in zip(*np.nonzero(lm))
    )
    return GridScan(
        omegas, alphas, rho, mask, incumbent, float(masked[i, j]),
        local_minima=[(w, a, r) for r, w, a in minima],
    )


def refined_local_minima(
    scan: GridScan, m_max: int = DEFAULT_M_MAX, tol: float = 1e-10, merge: float = 1e-6
) -> list[tuple[float, float, float]]:
    """Polish every lattice local minimum and merge the ones that land together.

    Lattice minima alias along the creases where two surfaces cross, so the raw
    list overstates how many minima there are.
    """
    found: list[tuple[float, float, float]] = []
    for w, a, _ in scan.local_minima:
        try:
            rep = refine_local(HelixParams(w, a), tol, m_max)
        except NonConvergence:
            continue
        if not any(abs(rep.omega - fw) < merge and abs(rep.alpha - fa) < merge for fw, fa, _ in found):
            found.append((rep.omega, rep.alpha, rep.rho))
    return sorted(found, key=lambda t: t[2])


@dataclass
class OptimumReport:
    omega: float
    alpha: float
    rho: float
    surface_values: list[float]  # rho_1..rho_5 at the optimum
    tie_residuals: list[float]  # |rho_1 - rho_2|, |rho_1 - rho_3|
    interior: bool
    grid_resolution: list[int] | None
    refine_tolerance: float | None
    evaluations: int
    step_distances: list[float] = field(default_factory=list)  # d_1..d_3

    @property
    def params(self) -> HelixParams:
        return HelixParams(self.omega, self.alpha)


def build_report(
    p: HelixParams,
    m_max: int = DEFAULT_M_MAX,
    *,
    interior: bool,
    grid_resolution=None,
    refine_tolerance=None,
    evaluations: int = 0,
) -> OptimumReport:
    surf = [rho_surface(m, p) for m in range(1, 6)]
    return OptimumReport(
        omega=p.omega,
        alpha=p.alpha,
        rho=srf(p, m_max).rho,
        surface_values=surf,
        tie_residuals=[abs(surf[0] - surf[1]), abs(surf[0] - surf[2])],
        interior=interior,
        grid_resolution=list(grid_resolution) if grid_resolution else None,
        refine_tolerance=refine_tolerance,
        evaluations=evaluations,
        step_distances=[step_distance(m, p) for m in (1, 2, 3)],
    )


def is_interior(p: HelixParams, radius: float, m_max: int = DEFAULT_M_MAX, directions: int = 16) -> bool:
    """True when ``p`` and a ring of points at ``radius`` around it are all feasible."""
    if not in_compact_region(p, m_max):
        return False
    for t in np.linspace(0.0, 2.0 * math.pi, directions, endpoint=False):
        w = p.omega + radius * math.cos(t)
        a = p.alpha + radius * math.sin(t)
        if a <= 0.0 or not in_compact_region(HelixParams(w, a), m_max):
            return False
    return True


def _barrier_objective(m_max: int):
    def f(x):
        w, a = float(x[0]), float(x[1])
        if not (w > 0.0 and a > 0.0 and math.isfinite(w) and math.isfinite(a)):
            return math.inf
        res = in_compact_region(HelixParams(w, a), m_max)
        return res.rho if res.inside else math.inf

    return f


def refine_local(
    start: HelixParams,
    tol: float = DEFAULT_TOL,
    m_max: int = DEFAULT_M_MAX,
    budget: int = DEFAULT_BUDGET,
    max_restarts: int = 20,
) -> OptimumReport:
    """Nelder-Mead from ``start`` with infeasible vertices rejected (objective = inf).

    Stops when the simplex fits inside ``tol`` in every coordinate. The simplex
    is rebuilt around the result until a restart no longer moves it, which
    guards against the collapse Nelder-Mead is prone to on the kinked
    max-of-surfaces objective.
    """
    if tol < 1e-14:
        raise SpecError(f"tolerance must be >= 1e-14, got {tol}")
    f = _barrier_objective(m_max)
    if not math.isfinite(f(start.as_tuple())):
        raise DomainError(f"refinement start {start} is outside the compact region")

    x = np.array(start.as_tuple())
    evaluations = 0
    for _ in range(max_restarts):
        res = minimize(
            f, x, method="Nelder-Mead",
            options={"xatol": tol, "fatol": math.inf, "maxfev": budget - evaluations},
        )
        evaluations += res.nfev
        if evaluations >= budget:
            raise NonConvergence(f"Nelder-Mead exhausted {budget} evaluations near {res.x}")
        moved = float(np.max(np.abs(res.x - x)))
        if f(res.x) <= f(x):
            x = res.x
        if moved <= tol:
            break
    else:
        log.warning("refinement still moving after %d restarts", max_restarts)

    p = HelixParams(float(x[0]), float(x[1]))
    return build_report(
        p, m_max,
        interior=is_interior(p, 10.0 * tol, m_max),
        refine_tolerance=tol,
        evaluations=evaluations,
    )


def _triple_residual(w: float, u: float) -> np.ndarray:
    # d_1^2 - d_2^2 and d_1^2 - d_3^2 with u = (alpha omega)^2
    cw = math.cos(w)
    return np.array([
        -3.0 * u - 2.0 * cw + 2.0 * math.cos(2.0 * w),
        -8.0 * u - 2.0 * cw + 2.0 * math.cos(3.0 * w),
    ])


def _triple_jacobian(w: float) -> np.ndarray:
    sw = math.sin(w)
    return np.array([
        [2.0 * sw - 4.0 * math.sin(2.0 * w), -3.0],
        [2.0 * sw - 6.0 * math.sin(3.0 * w), -8.0],
    ])


@dataclass(frozen=True)
class TriplePoint:
    params: HelixParams
    iterations: int
    residual: float


def solve_triple_point(
    initial: HelixParams,
    damping: float = 0.5,
    max_iter: int = 200,
    residual_tol: float = 1e-13,
) -> TriplePoint:
    """Point where surfaces 1, 2 and 3 meet, by damped Newton on (omega, (alpha omega)^2).

    Eliminating u leaves ``(c - 1)^2 (3c + 2) = 0`` in ``c = cos omega``; the
    double root c = 1 (coincident terminals) attracts undamped iterates, so the
    step is cut by ``damping`` until the residual norm decreases.
    """
    if initial.omega not in omega_window():
        raise DomainError(f"initial omega {initial.omega:.10g} outside the omega window")
    w, u = initial.omega, initial.u ** 2
    r = _triple_residual(w, u)
    norm = float(np.max(np.abs(r)))
    for it in range(1, max_iter + 1):
        if norm < residual_tol:
            break
        try:
            step = np.linalg.solve(_triple_jacobian(w), -r)
        except np.linalg.LinAlgError as exc:
            raise NonConvergence(f"singular Jacobian at omega = {w:.10g}") from exc
        lam = 1.0
        while lam > 1e-12:
            w_new, u_new = w + lam * step[0], u + lam * step[1]
            r_new = _triple_residual(w_new, u_new)
            if float(np.max(np.abs(r_new))) < norm:
                break
            lam *= damping
        else:
            raise NonConvergence(f"damped Newton stalled at omega = {w:.10g}, residual {norm:.3g}")
        w, u, r = float(w_new), float(u_new), r_new
        norm = float(np.max(np.abs(r)))
    else:
        raise NonConvergence(f"no triple point after {max_iter} iterations (residual {norm:.3g})")

    if 1.0 - math.cos(w) < 1e-8 or u <= 0.0:
        raise DegenerateRoot(f"Newton converged to the trivial root omega = {w:.10g}")
    return TriplePoint(HelixParams(w, math.sqrt(u) / w), it, norm)


def canonical(p: HelixParams) -> tuple[HelixParams, bool]:
    """Map omega > pi onto its mirror partner below pi; ``rho`` is unchanged."""
    if p.omega > math.pi:
        return symmetry_image(p, 1), True
    return p, False


@dataclass
class ConjectureConfig:
    grid: tuple[int, int] = DEFAULT_GRID
    alpha_hi: float = DEFAULT_ALPHA_HI
    m_max: int = DEFAULT_M_MAX
    tol: float = DEFAULT_TOL
    triple_initial: tuple[float, float] = (2.0, 0.3)
    threads: int = 1
    point_tol: float = 1e-8
    rho_tol: float = 1e-10


@dataclass
class ConjectureReport:
    optimum: OptimumReport
    mirrored: bool
    triple: TriplePoint
    grid_incumbent: HelixParams
    local_minima: list[tuple[float, float, float]]
    provenance: str

    @property
    def rho_min(self) -> float:
        return self.optimum.rho

    def as_dict(self) -> dict:
        o = self.optimum
        return {
            "omega": o.omega,
            "alpha": o.alpha,
            "rho": o.rho,
            "rho_min": o.rho,
            "rho_closed_form": RHO_CONJECTURE,
            "rho_error": abs(o.rho - RHO_CONJECTURE),
            "omega_closed_form": OMEGA_R,
            "alpha_closed_form": ALPHA_R,
            "surface_values": o.surface_values,
            "tie_residuals": o.tie_residuals,
            "step_distances": o.step_distances,
            "interior": o.interior,
            "graham_hwang_ok": o.rho >= GRAHAM_HWANG,
            "grid_resolution": o.grid_resolution,
            "refine_tolerance": o.refine_tolerance,
            "evaluations": o.evaluations,
            "mirrored": self.mirrored,
            "grid_omega": self.grid_incumbent.omega,
            "grid_alpha": self.grid_incumbent.alpha,
            "triple_omega": self.triple.params.omega,
            "triple_alpha": self.triple.params.alpha,
            "triple_iterations": self.triple.iterations,
            "local_minima": [list(t) for t in self.local_minima],
            "provenance": self.provenance,
        }


def conjecture_report(config: ConjectureConfig | None = None) -> ConjectureReport:
    cfg = config or ConjectureConfig()
    scan = grid_scan(alpha_hi=cfg.alpha_hi, resolution=cfg.grid, m_max=cfg.m_max, threads=cfg.threads)
    refined = refine_local(scan.incumbent, cfg.tol, cfg.m_max)
    point, mirrored = canonical(refined.params)
    optimum = build_report(
        point, cfg.m_max,
        interior=refined.interior,
        grid_resolution=cfg.grid,
        refine_tolerance=cfg.tol,
        evaluations=refined.evaluations,
    )
    triple = solve_triple_point(HelixParams(*cfg.triple_initial))
    t_point, _ = canonical(triple.params)
    t_rho = srf(t_point, cfg.m_max).rho

    checks = [
        ("refine/triple omega", point.omega, t_point.omega, cfg.point_tol),
        ("refine/triple alpha", point.alpha, t_point.alpha, cfg.point_tol),
        ("refine/triple rho", optimum.rho, t_rho, cfg.rho_tol),
        ("refine/closed-form omega", point.omega, OMEGA_R, cfg.point_tol),
        ("refine/closed-form alpha", point.alpha, ALPHA_R, cfg.point_tol),
        ("refine/closed-form rho", optimum.rho, RHO_CONJECTURE, cfg.rho_tol),
    ]
    for name, a, b, tol in checks:
        if not abs(a - b) <= tol:
            raise CrossCheckFailure(f"{name} disagree: {a!r} vs {b!r} (tolerance {tol:g})")
    d_omega, d_alpha = scan.spacing
    g_point, _ = canonical(scan.incumbent)
    if abs(g_point.omega - point.omega) > 2 * d_omega or abs(g_point.alpha - point.alpha) > 2 * d_alpha:
        raise CrossCheckFailure(
            f"grid incumbent {g_point} is more than two lattice cells from the refined optimum {point}"
        )

    provenance = (
        f"grid {cfg.grid[0]}x{cfg.grid[1]} over omega in [{omega_window().lo:.10f}, "
        f"{omega_window().hi:.10f}], alpha in (0, {cfg.alpha_hi}]; Nelder-Mead to {cfg.tol:g}"
        f"{' (mirrored from omega > pi)' if mirrored else ''}; damped Newton triple point in "
        f"{triple.iterations} iterations; closed form (3*sqrt(3)+sqrt(7))/10 = {RHO_CONJECTURE!r}, "
        f"|difference| = {abs(optimum.rho - RHO_CONJECTURE):.3g}"
    )
    minima = refined_local_minima(scan, cfg.m_max)
    return ConjectureReport(optimum, mirrored, triple, scan.incumbent, minima, provenance)
