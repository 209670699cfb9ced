import math

import mpmath
import numpy as np
import pytest

from conftest import mp_rho, mp_step
from helixsrf.analytic import (
    ALPHA_MIRROR,
    ALPHA_R,
    OMEGA_MIRROR,
    RHO_CONJECTURE,
    STEP_R,
    a_coefficient,
    cos_theta,
    radius,
    rho_surface,
    srf,
    srf_grid,
    step_distance,
    steiner_length_density,
    surface_sample,
    symmetry_image,
)
from helixsrf.errors import DegenerateError, DomainError, SpecError
from helixsrf.helix import HelixParams, terminal_point
from helixsrf.region import sample_feasible

SQ3 = math.sqrt(3)


def test_alpha_reading_reproduces_closed_form():
    # the division reading of alpha_R is the one giving (3 sqrt3 + sqrt7)/10
    lhs = (1 + math.sqrt(21) / 9) / (10 * SQ3 / 9)
    assert abs(lhs - (3 * SQ3 + math.sqrt(7)) / 10) <= 1e-14
    assert ALPHA_R == pytest.approx(0.2645400, abs=1e-7)
    assert RHO_CONJECTURE == pytest.approx(0.78419037337, abs=1e-11)


@pytest.mark.parametrize(
    "m, omega, expected",
    [(1, math.pi / 3, 0.0), (2, math.pi, -1.0), (3, math.pi - math.acos(2 / 3), -17 / 27)],
)
def test_a_coefficient(m, omega, expected):
    assert a_coefficient(m, omega) == pytest.approx(expected, abs=1e-14)


def test_a_coefficient_rejects_m0():
    with pytest.raises(SpecError):
        a_coefficient(0, 1.0)


def test_radius_examples(conj):
    assert radius(1, HelixParams(math.pi, 1.0)) == pytest.approx(math.pi / (2 * SQ3), abs=1e-15)
    assert radius(1, conj) == pytest.approx(1 / math.sqrt(21), abs=1e-15)
    with pytest.raises(DomainError):
        radius(1, HelixParams(math.pi / 3, 0.5))


def test_cos_theta_examples(conj):
    assert cos_theta(1, conj) == pytest.approx(0.5, abs=1e-14)
    assert cos_theta(1, HelixParams(math.pi, 2 * SQ3 / math.pi)) == pytest.approx(-0.5, abs=1e-14)
    assert cos_theta(1, HelixParams(math.pi, 0.0)) == pytest.approx(1.0, abs=1e-15)
    assert cos_theta(1, HelixParams(math.pi, 1e-9)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DegenerateError):
        cos_theta(2, HelixParams(math.pi, 0.0))


def test_cos_theta_is_the_turning_angle(rng):
    # angle P_{j-m} P_j P_{j+m} from coordinates
    for _ in range(200):
        m = int(rng.integers(1, 6))
        p = HelixParams(rng.uniform(0.1, 6.1), rng.uniform(0.01, 2))
        a, b, c = (np.array(terminal_point(j, p)) for j in (0, m, 2 * m))
        u, v = a - b, c - b
        direct = u @ v / (np.linalg.norm(u) * np.linalg.norm(v))
        assert cos_theta(m, p) == pytest.approx(direct, abs=1e-12)


def test_step_distance_examples(conj):
    assert step_distance(1, HelixParams(math.pi, 0.0)) == pytest.approx(2.0, abs=1e-15)
    for m in (1, 2, 3):
        assert step_distance(m, conj) == pytest.approx(10 * SQ3 / 9, abs=1e-14)
    assert step_distance(2, HelixParams(math.pi, 0.2)) == pytest.approx(0.4 * math.pi, abs=1e-14)


def test_step_distance_matches_coordinates(rng):
    for _ in range(300):
        m = int(rng.integers(1, 17))
        p = HelixParams(rng.uniform(0.05, 6.2), rng.uniform(0, 2))
        direct = np.sum((np.array(terminal_point(0, p)) - np.array(terminal_point(m, p))) ** 2)
        assert step_distance(m, p) ** 2 == pytest.approx(direct, abs=1e-13, rel=1e-13)


def test_steiner_density_examples(conj):
    assert steiner_length_density(1, HelixParams(2.0, 0.0)) == 1.0
    assert steiner_length_density(1, conj) == pytest.approx(1 + math.sqrt(21) / 9, abs=1e-14)
    assert steiner_length_density(1, conj) == pytest.approx(1.5091751, abs=1e-7)
    assert steiner_length_density(1, HelixParams(math.pi / 3, 1.0)) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        steiner_length_density(3, conj)  # A_3 = -17/27


def test_rho_surface_examples(conj):
    assert rho_surface(1, conj) == pytest.approx(0.78419037337, abs=1e-11)
    assert rho_surface(2, conj) == pytest.approx(0.7841903734, abs=1e-10)
    # A_3 < 0 is fine for the surface itself
    assert rho_surface(3, conj) == pytest.approx(RHO_CONJECTURE, abs=1e-14)
    assert rho_surface(1, HelixParams(math.pi, 0.0)) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        rho_surface(1, HelixParams(1.0, 0.3))


def test_surface_sample_fields(conj):
    s = surface_sample(3, conj)
    assert s.a_m == pytest.approx(-17 / 27)
    assert s.density_st is None
    assert s.d_m == pytest.approx(STEP_R)
    assert s.rho_m > 0


def test_srf_at_tetrahedral_point(conj):
    v = srf(conj, 16)
    assert v.rho == pytest.approx(0.78419037337, abs=1e-11)
    assert v.tie == [1, 2, 3]
    assert v.argmin_m in (1, 2, 3)
    assert v.rho == rho_surface(v.argmin_m, conj)
    assert not v.truncated


def test_srf_outside_band():
    p = HelixParams(math.pi, 0.2)
    v = srf(p, 16)
    # independent evaluation from coordinates
    assert v.rho == pytest.approx(float(mp_rho(math.pi, 0.2)), abs=1e-14)
    assert v.rho == pytest.approx(1.2287874, abs=1e-7)
    assert v.argmin_m == 2


def test_srf_coincident_terminals():
    # omega = pi, alpha = 0: P_0 and P_2 coincide, so the minimal step vanishes
    with pytest.raises(DegenerateError):
        srf(HelixParams(math.pi, 0.0), 16)


def test_srf_requires_m_max_3():
    with pytest.raises(SpecError):
        srf(HelixParams(2.0, 0.3), 2)


def test_srf_truncation_flag():
    # d_3 = 3 alpha omega is tiny near omega = 2 pi / 3, so the minimiser is m_max = 3
    v = srf(HelixParams(2 * math.pi / 3, 0.01), 3)
    assert v.argmin_m == 3 and v.truncated


def test_srf_min_numerator_variant(conj):
    canonical = srf(conj, 16)
    variant = srf(conj, 16, numerator="min")
    assert variant.rho <= canonical.rho + 1e-15
    with pytest.raises(SpecError):
        srf(conj, 16, numerator="max")


def test_srf_against_mpmath(rng):
    for p in sample_feasible(rng, 100):
        assert srf(p).rho == pytest.approx(float(mp_rho(p.omega, p.alpha)), abs=1e-13)


def test_srf_at_zero_pitch(rng):
    for omega in rng.uniform(1.4, 4.9, 50):
        p = HelixParams(float(omega), 0.0)
        expected = 1 / min(math.sqrt(2 - 2 * math.cos(m * omega)) for m in range(1, 17))
        assert srf(p).rho == pytest.approx(expected, rel=1e-12)


def test_rho1_tail_stays_below_tangency(rng):
    for omega in rng.uniform(1.2, 5.0, 40):
        a1 = 1 - 2 * math.cos(omega)
        tangency = math.sqrt(a1 * (1 + a1)) / omega
        peak = rho_surface(1, HelixParams(omega, tangency))
        far = rho_surface(1, HelixParams(omega, 1e3))
        assert peak == pytest.approx(1.0, abs=1e-12)
        assert far < peak
        # the large-alpha limit is sqrt(A_1 / (1 + A_1)), not zero
        assert far == pytest.approx(math.sqrt(a1 / (1 + a1)), abs=1e-3)


def test_rho1_continuous_in_alpha():
    alphas = np.linspace(0, 5, 20001)
    vals = np.array([rho_surface(1, HelixParams(2.0, a)) for a in alphas])
    assert np.max(np.abs(np.diff(vals))) < 1e-3


def test_symmetry_image_of_tetrahedral_point(conj):
    img = symmetry_image(conj, 1)
    assert img.omega == pytest.approx(math.pi + math.acos(2 / 3), abs=1e-14)
    assert img.alpha == pytest.approx(0.1528075, abs=1e-7)
    assert img.alpha == pytest.approx(math.sqrt(30) / 9 / OMEGA_MIRROR, abs=1e-15)
    assert (img.omega, img.alpha) == pytest.approx((OMEGA_MIRROR, ALPHA_MIRROR), abs=1e-14)
    assert srf(img).rho == pytest.approx(srf(conj).rho, abs=1e-12)


def test_symmetry_is_involution(rng):
    for _ in range(200):
        p = HelixParams(rng.uniform(0.1, 6.2), rng.uniform(0, 2))
        N = int(rng.integers(1, 4))
        back = symmetry_image(symmetry_image(p, N), N)
        assert back.omega == pytest.approx(p.omega, abs=1e-13)
        assert back.alpha == pytest.approx(p.alpha, abs=1e-13)
        assert symmetry_image(p, N).u == pytest.approx(p.u, rel=1e-14)


def test_symmetry_errors():
    with pytest.raises(DomainError):
        symmetry_image(HelixParams(7.0, 0.1), 1)
    with pytest.raises(SpecError):
        symmetry_image(HelixParams(2.0, 0.1), 0)


def test_every_surface_is_symmetric(rng):
    for p in sample_feasible(rng, 300):
        img = symmetry_image(p, 1)
        for m in range(1, 17):
            assert rho_surface(m, img) == pytest.approx(rho_surface(m, p), abs=1e-12)
        assert srf(img).rho == pytest.approx(srf(p).rho, abs=1e-12)


def test_symmetry_with_larger_N(rng):
    for p in sample_feasible(rng, 50):
        img = symmetry_image(p, 3)
        assert img.omega > 2 * math.pi
        assert srf(img).rho == pytest.approx(srf(p).rho, abs=1e-12)


def test_tie_set_exact(conj):
    d = [step_distance(m, conj) for m in range(1, 17)]
    assert {m for m, dm in enumerate(d, 1) if dm - min(d) <= 1e-10} == {1, 2, 3}
    for m in (1, 2, 3):
        assert float(mp_step(m, conj.omega, conj.alpha)) == pytest.approx(STEP_R, abs=1e-14)


def test_srf_grid_matches_scalar(rng):
    w = rng.uniform(1.32, 4.96, 500)
    a = rng.uniform(0.01, 2, 500)
    grid = srf_grid(w, a)
    for wi, ai, gi in zip(w, a, grid):
        assert gi == pytest.approx(srf(HelixParams(float(wi), float(ai))).rho, rel=1e-13)


def test_srf_grid_marks_undefined():
    out = srf_grid(np.array([0.5, math.pi]), np.array([0.3, 0.0]))
    assert np.isnan(out).all()


def test_mpmath_oracle_sanity():
    assert mp_rho(math.pi - mpmath.acos(mpmath.mpf(2) / 3), ALPHA_R) == pytest.approx(RHO_CONJECTURE, abs=1e-14)
