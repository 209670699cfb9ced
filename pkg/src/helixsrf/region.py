"""Feasible region for the SRF minimisation.

The region is the omega strip ``arccos(1/4) <= omega <= 2 pi - arccos(1/4)``,
intersected with the hypograph of the ``rho_1 = 1`` curve and with the
complement of the strict hypographs of every ``rho_k = 1`` curve, k >= 2.

Surface 1 never exceeds 1: squaring ``rho_1 = 1`` collapses to
``(u - sqrt(A_1 (1 + A_1)))^2 = 0``, so its unit curve is a tangency curve,
``alpha_1(omega) = sqrt(A_1 (1 + A_1)) / omega``. Lying on or below that curve
is the same thing as the m = 1 full-tree condition ``cos theta_1 >= -1/2``
(Steiner radius <= 1), and that is how the hypograph is tested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Literal

import numpy as np
from scipy.optimize import brentq

from .analytic import (
    DEFAULT_M_MAX,
    GRAHAM_HWANG,
    a_coefficient,
    cos_theta,
    rho_surface,
    srf,
    srf_grid,
)
from .errors import DomainError, SpecError
from .helix import TWO_PI, HelixParams

BRACKET_CELLS = 512
BRACKET_ALPHA_MAX = 10.0


@dataclass(frozen=True)
class OmegaWindow:
    lo: float
    hi: float

    def __contains__(self, omega: float) -> bool:
        return self.lo <= omega <= self.hi


def omega_window() -> OmegaWindow:
    lo = math.acos(0.25)
    return OmegaWindow(lo, TWO_PI - lo)


def full_tree_feasible(m: int, p: HelixParams) -> bool:
    return cos_theta(m, p) >= -0.5


def full_tree_flip_alpha(m: int, omega: float) -> float:
    """Alpha where ``cos theta_m`` crosses -1/2, located by bracketing on the cosine."""
    if a_coefficient(m, omega) <= 0.0:
        raise DomainError(f"A_{m} <= 0 at omega = {omega:.10g}: full-tree condition has no flip")

    def g(alpha):
        return cos_theta(m, HelixParams(omega, alpha)) + 0.5

    hi = 1.0
    while g(hi) > 0.0:
        hi *= 2.0
    return brentq(g, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def rho1_tangency_alpha(omega: float) -> float:
    """Closed-form alpha of the ``rho_1 = 1`` tangency curve."""
    a = a_coefficient(1, omega)
    if a <= 0.0:
        raise DomainError(f"omega = {omega:.10g} outside the numerator domain (A_1 <= 0)")
    return math.sqrt(a * (1.0 + a)) / omega


def unit_rho_curve(
    m: int,
    omega: float,
    method: Literal["closed_form", "bracket"] = "closed_form",
    alpha_max: float = BRACKET_ALPHA_MAX,
    cells: int = BRACKET_CELLS,
) -> list[float]:
    """All alpha in (0, alpha_max] with ``rho_m(omega, alpha) = 1``, ascending.

    ``closed_form`` solves the quadratic obtained by squaring, in u = alpha*omega,

        (m^2 - s^2) u^2 - 2 s u + A_m = 0,   s = sqrt(A_1 / (1 + A_1)),

    and reports a double root once (this is always the case for m = 1).
    ``bracket`` scans ``cells`` equal alpha cells and bisects sign changes; it
    cannot see tangencies and exists as an independent check.
    """
    a1 = a_coefficient(1, omega)
    if a1 <= 0.0:
        raise DomainError(f"omega = {omega:.10g} outside the numerator domain (A_1 <= 0)")
    if method == "bracket":
        return _bracket_roots(m, omega, alpha_max, cells)
    if method != "closed_form":
        raise SpecError(f"unknown root method {method!r}")

    s2 = a1 / (1.0 + a1)
    s = math.sqrt(s2)
    am = a_coefficient(m, omega)
    qa, qb, qc = m * m - s2, -2.0 * s, am
    disc = s2 - qa * qc  # quarter discriminant
    scale = max(s2, abs(qa * qc))
    if disc < -1e-12 * scale:
        return []
    if disc <= 1e-12 * scale:
        us = [s / qa]
    else:
        # stable pair: q = -(b/2 + sign(b/2) sqrt(disc))
        q = s + math.sqrt(disc)
        us = sorted({q / qa, qc / q})
    roots = [u / omega for u in us if u > 0.0 and u / omega <= alpha_max]
    if len(us) == 2:
        roots = [_polish(m, omega, r) for r in roots]
    return roots


def _polish(m: int, omega: float, alpha: float) -> float:
    def g(a):
        return rho_surface(m, HelixParams(omega, a)) - 1.0

    h = 1e-9 * max(alpha, 1e-3)
    lo, hi = max(alpha - h, 0.0), alpha + h
    if g(lo) * g(hi) < 0.0:
        return brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return alpha


def _bracket_roots(m: int, omega: float, alpha_max: float, cells: int) -> list[float]:
    def g(a):
        return rho_surface(m, HelixParams(omega, a)) - 1.0

    # open at alpha = 0, where terminals may coincide
    edges = np.linspace(0.0, alpha_max, cells + 1)
    edges[0] = 1e-12 * alpha_max
    vals = [g(float(a)) for a in edges]
    roots = []
    for lo, hi, glo, ghi in zip(edges[:-1], edges[1:], vals[:-1], vals[1:]):
        if glo == 0.0:
            roots.append(float(lo))
        elif glo * ghi < 0.0:
            roots.append(brentq(g, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps))
    if vals[-1] == 0.0:
        roots.append(float(edges[-1]))
    return roots


@dataclass(frozen=True)
class RegionPredicateResult:
    inside: bool
    # one of: omega_window, numerator_domain, rho1_hypograph, rhok_hypograph, graham_hwang
    failed_constraint: str | None = None
    k: int | None = None  # offending surface for rhok_hypograph
    rho: float | None = None

    def __bool__(self) -> bool:
        return self.inside


def in_compact_region(p: HelixParams, m_max: int = DEFAULT_M_MAX) -> RegionPredicateResult:
    if m_max < 5:
        raise SpecError(f"m_max must be >= 5 to cover the unit curves m = 1..5, got {m_max}")
    if p.omega not in omega_window():
        return RegionPredicateResult(False, "omega_window")
    if a_coefficient(1, p.omega) <= 0.0:
        return RegionPredicateResult(False, "numerator_domain")
    if not full_tree_feasible(1, p):
        return RegionPredicateResult(False, "rho1_hypograph")
    value = srf(p, m_max)
    if value.rho > 1.0:
        k = next(k for k in range(2, m_max + 1) if rho_surface(k, p) > 1.0)
        return RegionPredicateResult(False, "rhok_hypograph", k=k, rho=value.rho)
    if value.rho < GRAHAM_HWANG:
        return RegionPredicateResult(False, "graham_hwang", rho=value.rho)
    return RegionPredicateResult(True, rho=value.rho)


def region_mask(omega: np.ndarray, alpha: np.ndarray, m_max: int = DEFAULT_M_MAX):
    """Vectorised :func:`in_compact_region`; returns ``(mask, rho)``."""
    omega, alpha = np.broadcast_arrays(np.asarray(omega, float), np.asarray(alpha, float))
    win = omega_window()
    a1 = 1.0 - 2.0 * np.cos(omega)
    u2 = (alpha * omega) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        cos1 = -1.0 + (1.0 + a1) ** 2 / (2.0 * (u2 + 1.0 + a1))
    rho = srf_grid(omega, alpha, m_max)
    with np.errstate(invalid="ignore"):
        mask = (
            (omega >= win.lo) & (omega <= win.hi) & (a1 > 0.0) & (alpha >= 0.0)
            & (cos1 >= -0.5) & (rho <= 1.0) & (rho >= GRAHAM_HWANG)
        )
    return mask, rho


def sample_feasible(
    rng: np.random.Generator, count: int, m_max: int = DEFAULT_M_MAX
) -> Iterator[HelixParams]:
    """Rejection-sample points of the compact region (uniform in omega, then alpha)."""
    win = omega_window()
    found = 0
    while found < count:
        omega = float(rng.uniform(win.lo, win.hi))
        alpha = float(rng.uniform(0.0, rho1_tangency_alpha(omega)))
        if alpha <= 0.0:
            continue
        p = HelixParams(omega, alpha)
        if in_compact_region(p, m_max):
            found += 1
            yield p
