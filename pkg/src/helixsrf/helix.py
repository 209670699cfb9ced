"""Points on the terminal helix and on the inner Steiner helix.

Terminals sit on a unit-radius right circular helix, ``P_j = (cos jw, sin jw, a j w)``.
Steiner points share the pitch but sit on a smaller radius fixed by the 120 degree
condition (see :func:`helixsrf.analytic.radius`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

from .errors import DegenerateError, DomainError, SpecError

TWO_PI = 2.0 * math.pi


class Point3(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class HelixParams:
    """Angular step ``omega`` (radians) and pitch parameter ``alpha`` (pitch = 2*pi*alpha).

    ``omega`` only has to be positive: images under :func:`~helixsrf.analytic.symmetry_image`
    with N >= 2 live beyond 2*pi and are still valid inputs to every closed form.
    """

    omega: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.alpha)):
            raise DomainError(f"non-finite helix parameters ({self.omega}, {self.alpha})")
        if self.omega <= 0.0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        if self.alpha < 0.0:
            raise DomainError(f"alpha must be non-negative, got {self.alpha}")

    @property
    def u(self) -> float:
        """Vertical rise per step, alpha*omega."""
        return self.alpha * self.omega

    def as_tuple(self) -> tuple[float, float]:
        return (self.omega, self.alpha)


def terminal_point(j: int, p: HelixParams) -> Point3:
    if j < 0:
        raise SpecError(f"terminal index must be >= 0, got {j}")
    t = j * p.omega
    return Point3(math.cos(t), math.sin(t), p.alpha * t)


def terminal_points(n: int, p: HelixParams) -> np.ndarray:
    """The first ``n`` terminals as an ``(n, 3)`` array."""
    t = np.arange(n) * p.omega
    return np.column_stack([np.cos(t), np.sin(t), p.alpha * t])


def steiner_point_ansatz(k: int, p: HelixParams, m: int = 1) -> Point3:
    from .analytic import radius

    r = radius(m, p)
    t = k * p.omega
    return Point3(r * math.cos(t), r * math.sin(t), p.alpha * t)


def steiner_points_ansatz(n: int, p: HelixParams, m: int = 1) -> np.ndarray:
    """Ansatz positions of S_1..S_{n-2} as an ``(n-2, 3)`` array."""
    from .analytic import radius

    r = radius(m, p)
    t = np.arange(1, n - 1) * p.omega
    return np.column_stack([r * np.cos(t), r * np.sin(t), p.alpha * t])


@dataclass(frozen=True)
class SubsequenceSpec:
    """Every ``skip``-th index starting at ``start``; ``skip - 1`` points are skipped."""

    start: int
    skip: int
    n: int
    kind: Literal["terminal", "steiner"] = "terminal"
    l_max: int = field(init=False)

    def __post_init__(self):
        if self.kind not in ("terminal", "steiner"):
            raise SpecError(f"unknown subsequence kind {self.kind!r}")
        top = self.n - 1 if self.kind == "terminal" else self.n - 2
        if self.skip < 1 or not (0 <= self.start <= self.skip - 1 <= top):
            raise SpecError(
                f"need 0 <= start <= m-1 <= {top} for {self.kind} subsequence, "
                f"got start={self.start}, m={self.skip}, n={self.n}"
            )
        offset = 1 if self.kind == "terminal" else 2
        object.__setattr__(self, "l_max", (self.n - self.start - offset) // self.skip)


def subsequence_indices(spec: SubsequenceSpec) -> list[int]:
    return [spec.start + l * spec.skip for l in range(spec.l_max + 1)]


def recover_angle(s: Point3, alpha: float) -> float:
    """Unwrapped polar angle of a point on a helix of pitch ``2*pi*alpha``.

    The principal angle comes from atan2 folded into [0, 2*pi), which is the
    same as the arctan-plus-quadrant table. The turn count is floor(z / (2*pi*alpha)).
    When the point sits within rounding of a turn boundary the two pieces can
    disagree by a full turn; that is corrected against z / alpha.
    """
    x, y, z = s
    if x == 0.0 and y == 0.0:
        raise DegenerateError("polar angle undefined on the helix axis")
    if not alpha > 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    principal = math.atan2(y, x) % TWO_PI
    turns = math.floor(z / (TWO_PI * alpha))
    theta = principal + TWO_PI * turns
    gap = theta - z / alpha
    if gap > math.pi:
        theta -= TWO_PI
    elif gap < -math.pi:
        theta += TWO_PI
    return theta
