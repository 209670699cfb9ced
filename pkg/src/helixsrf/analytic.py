"""Closed-form Steiner ratio surfaces of helical point sets.

For skip class ``m`` (every m-th terminal joined), with ``u = alpha*omega``:

    A_m       = 1 - 2 cos(m omega)
    d_m       = sqrt(m^2 u^2 + 1 + A_m)          spanning-tree length per terminal
    l_st(m)   = 1 + m u sqrt(A_m / (1 + A_m))    Steiner-tree length per terminal
    rho_m     = l_st(1) / d_m

and the Steiner ratio function is ``rho = max_m rho_m = l_st(1) / min_m d_m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DegenerateError, DomainError, SpecError
from .helix import TWO_PI, HelixParams

DEFAULT_M_MAX = 16
TIE_TOL = 1e-12
A_ROUNDING = 8.0 * np.finfo(float).eps  # 1 - 2cos(pi/3) evaluates to -2.2e-16

# The regular-tetrahedron (3-sausage) point: cos(omega) = -2/3, alpha*omega = sqrt(30)/9.
OMEGA_R = math.pi - math.acos(2.0 / 3.0)
ALPHA_R = math.sqrt(30.0) / (9.0 * OMEGA_R)
OMEGA_MIRROR = math.pi + math.acos(2.0 / 3.0)
ALPHA_MIRROR = math.sqrt(30.0) / (9.0 * OMEGA_MIRROR)
STEP_R = 10.0 * math.sqrt(3.0) / 9.0
DENSITY_R = 1.0 + math.sqrt(21.0) / 9.0
RHO_CONJECTURE = (3.0 * math.sqrt(3.0) + math.sqrt(7.0)) / 10.0
GRAHAM_HWANG = math.sqrt(3.0) / 3.0


def conjecture_params() -> HelixParams:
    return HelixParams(OMEGA_R, ALPHA_R)


def a_coefficient(m: int, omega: float) -> float:
    if m < 1:
        raise SpecError(f"skip count must be >= 1, got {m}")
    return 1.0 - 2.0 * math.cos(m * omega)


def radius(m: int, p: HelixParams) -> float:
    """Radius of the inner helix carrying the Steiner points.

    Only defined for ``A_m > 0``; it equals 1 exactly on the unit-rho tangency
    curve of surface 1, which is also where the full-tree condition is tight.
    """
    a = a_coefficient(m, p.omega)
    if a <= 0.0:
        raise DomainError(f"Steiner radius undefined: A_{m} = {a:.6g} <= 0")
    return m * p.u / math.sqrt(a * (1.0 + a))


def cos_theta(m: int, p: HelixParams) -> float:
    """Cosine of the angle between consecutive edges P_{j-m} P_j P_{j+m}."""
    a = a_coefficient(m, p.omega)
    denom = 2.0 * ((m * p.u) ** 2 + 1.0 + a)
    if denom == 0.0:
        raise DegenerateError(f"terminals {m} steps apart coincide")
    return -1.0 + (1.0 + a) ** 2 / denom


def step_distance(m: int, p: HelixParams) -> float:
    a = a_coefficient(m, p.omega)
    # 1 + A_m = 2 - 2cos(m omega) >= 0 up to rounding
    return math.sqrt((m * p.u) ** 2 + max(1.0 + a, 0.0))


def steiner_length_density(m: int, p: HelixParams) -> float:
    a = a_coefficient(m, p.omega)
    if a < 0.0:
        if a < -A_ROUNDING:
            raise DomainError(f"Steiner length density undefined: A_{m} = {a:.6g} < 0")
        a = 0.0
    return 1.0 + m * p.u * math.sqrt(a / (1.0 + a))


def _numerator(p: HelixParams) -> float:
    if a_coefficient(1, p.omega) <= 0.0:
        raise DomainError(
            f"omega = {p.omega:.10g} outside the numerator domain (A_1 <= 0)"
        )
    return steiner_length_density(1, p)


def rho_surface(m: int, p: HelixParams) -> float:
    num = _numerator(p)
    d = step_distance(m, p)
    if d == 0.0:
        raise DegenerateError(f"terminals {m} steps apart coincide at {p}")
    return num / d


@dataclass(frozen=True)
class SurfaceSample:
    params: HelixParams
    m: int
    a_m: float
    rho_m: float
    d_m: float
    density_st: float | None  # None when A_m < 0
    cos_theta: float


def surface_sample(m: int, p: HelixParams) -> SurfaceSample:
    a = a_coefficient(m, p.omega)
    return SurfaceSample(
        params=p,
        m=m,
        a_m=a,
        rho_m=rho_surface(m, p),
        d_m=step_distance(m, p),
        density_st=steiner_length_density(m, p) if a >= 0.0 else None,
        cos_theta=cos_theta(m, p),
    )


@dataclass(frozen=True)
class SrfValue:
    rho: float
    argmin_m: int
    tie: list[int] = field(default_factory=list)
    truncated: bool = False


def srf(
    p: HelixParams,
    m_max: int = DEFAULT_M_MAX,
    numerator: Literal["m1", "min"] = "m1",
) -> SrfValue:
    """Steiner ratio function at ``p``, truncated to skip classes 1..m_max.

    ``numerator="m1"`` is the canonical function (Steiner length of the m = 1
    tree over the shortest spanning step). ``numerator="min"`` minimises the
    Steiner density over the classes where it is defined instead; it is kept
    for exploration only.

    ``truncated`` is set when the minimising class is ``m_max`` itself, in which
    case a larger ``m_max`` might change the answer.
    """
    if m_max < 3:
        raise SpecError(f"m_max must be >= 3, got {m_max}")
    num = _numerator(p)
    if numerator == "min":
        dens = [
            steiner_length_density(m, p)
            for m in range(1, m_max + 1)
            if a_coefficient(m, p.omega) >= 0.0
        ]
        num = min(dens)
    elif numerator != "m1":
        raise SpecError(f"unknown numerator variant {numerator!r}")
    d = [step_distance(m, p) for m in range(1, m_max + 1)]
    d_min = min(d)
    if d_min == 0.0:
        raise DegenerateError(f"coincident terminals at {p}: minimal step is zero")
    argmin = d.index(d_min) + 1
    tie = [m for m, dm in enumerate(d, start=1) if dm - d_min <= TIE_TOL]
    return SrfValue(rho=num / d_min, argmin_m=argmin, tie=tie, truncated=argmin == m_max)


def symmetry_image(p: HelixParams, N: int = 1) -> HelixParams:
    """The partner ``(2 pi N - omega, omega alpha / (2 pi N - omega))`` with the same rho."""
    if N < 1:
        raise SpecError(f"N must be a positive integer, got {N}")
    w = TWO_PI * N - p.omega
    if w <= 0.0:
        raise DomainError(f"2*pi*N = {TWO_PI * N:.10g} does not exceed omega = {p.omega:.10g}")
    return HelixParams(w, p.omega * p.alpha / w)


# -- array versions for lattice scans -------------------------------------------------

def step_distances_grid(omega: np.ndarray, alpha: np.ndarray, m_max: int) -> np.ndarray:
    """``d_m`` for m = 1..m_max stacked on a new leading axis."""
    u = np.asarray(alpha) * np.asarray(omega)
    ms = np.arange(1, m_max + 1).reshape((-1,) + (1,) * u.ndim)
    one_plus_a = np.maximum(2.0 - 2.0 * np.cos(ms * omega), 0.0)
    return np.sqrt((ms * u) ** 2 + one_plus_a)


def srf_grid(omega: np.ndarray, alpha: np.ndarray, m_max: int = DEFAULT_M_MAX) -> np.ndarray:
    """Broadcast SRF; NaN outside the numerator domain or where terminals coincide."""
    omega, alpha = np.broadcast_arrays(np.asarray(omega, float), np.asarray(alpha, float))
    a1 = 1.0 - 2.0 * np.cos(omega)
    with np.errstate(invalid="ignore", divide="ignore"):
        num = 1.0 + alpha * omega * np.sqrt(a1 / (1.0 + a1))
        d_min = step_distances_grid(omega, alpha, m_max).min(axis=0)
        rho = num / d_min
    rho[(a1 <= 0.0) | (d_min == 0.0)] = np.nan
    return rho
