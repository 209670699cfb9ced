"""Shared fixtures and an arbitrary-precision oracle.

The oracle recomputes ratios straight from terminal coordinates with mpmath,
independent of the closed forms under test.
"""
import math

import mpmath
import numpy as np
import pytest

from helixsrf.helix import HelixParams

mpmath.mp.dps = 40


def mp_terminal(j, omega, alpha):
    t = j * mpmath.mpf(omega)
    return mpmath.matrix([mpmath.cos(t), mpmath.sin(t), mpmath.mpf(alpha) * t])


def mp_step(m, omega, alpha):
    """Distance between terminals 0 and m, from coordinates."""
    return mpmath.norm(mp_terminal(m, omega, alpha) - mp_terminal(0, omega, alpha))


def mp_rho(omega, alpha, m_max=16):
    omega, alpha = mpmath.mpf(omega), mpmath.mpf(alpha)
    a1 = 1 - 2 * mpmath.cos(omega)
    num = 1 + alpha * omega * mpmath.sqrt(a1 / (1 + a1))
    return num / min(mp_step(m, omega, alpha) for m in range(1, m_max + 1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def conj():
    return HelixParams(math.pi - math.acos(2 / 3), math.sqrt(30) / (9 * (math.pi - math.acos(2 / 3))))
