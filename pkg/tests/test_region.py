import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helixsrf.analytic import GRAHAM_HWANG, rho_surface, srf
from helixsrf.errors import DomainError, SpecError
from helixsrf.helix import HelixParams
from helixsrf.region import (
    full_tree_feasible,
    full_tree_flip_alpha,
    in_compact_region,
    omega_window,
    region_mask,
    rho1_tangency_alpha,
    sample_feasible,
    unit_rho_curve,
)

SQ3 = math.sqrt(3)


def test_omega_window_values():
    w = omega_window()
    assert (w.lo, w.hi) == pytest.approx((1.3181161, 4.9650692), abs=1e-7)
    assert math.cos(w.lo) == pytest.approx(0.25, abs=1e-15)
    assert w.lo + w.hi == pytest.approx(2 * math.pi, abs=1e-15)
    assert 2.0 in w and 1.0 not in w


def test_unit_curve_m1_at_pi_is_tangent():
    roots = unit_rho_curve(1, math.pi)
    assert roots == pytest.approx([2 * SQ3 / math.pi], abs=1e-12)
    assert roots[0] == pytest.approx(1.1026578, abs=1e-7)
    # tangency: the bracket scan sees no sign change
    assert unit_rho_curve(1, math.pi, method="bracket") == []


def test_unit_curve_m2_at_pi():
    # (13/4) u^2 - sqrt3 u - 1 = 0
    u = (SQ3 + 4) / 6.5
    (root,) = unit_rho_curve(2, math.pi)
    assert root == pytest.approx(u / math.pi, abs=1e-14)
    assert root == pytest.approx(0.2807028, abs=1e-7)
    assert rho_surface(2, HelixParams(math.pi, root)) == pytest.approx(1.0, abs=1e-14)


def test_unit_curve_near_numerator_boundary():
    prev = math.inf
    for eps in (1e-2, 1e-4, 1e-6):
        (root,) = unit_rho_curve(1, math.pi / 3 + eps)
        assert root < prev
        prev = root
    assert prev < 1e-2


def test_unit_curve_outside_numerator_domain():
    with pytest.raises(DomainError):
        unit_rho_curve(1, 1.0)
    with pytest.raises(SpecError):
        unit_rho_curve(2, 2.0, method="secant")


def test_unit_curve_methods_agree(rng):
    w = omega_window()
    checked = 0
    for omega in rng.uniform(w.lo, w.hi, 60):
        for m in range(2, 6):
            closed = unit_rho_curve(m, float(omega))
            bracket = unit_rho_curve(m, float(omega), method="bracket")
            for r in closed:
                assert rho_surface(m, HelixParams(float(omega), r)) == pytest.approx(1.0, abs=1e-12)
            # brackets only see crossing roots; every one of them is a closed-form root
            for r in bracket:
                assert min(abs(r - c) for c in closed) < 1e-10
                checked += 1
    assert checked > 50


@pytest.mark.parametrize("omega", [1.5, 2.0, math.pi, 4.0, 4.9])
def test_rho1_tangency_is_full_tree_flip(omega):
    assert rho1_tangency_alpha(omega) == pytest.approx(full_tree_flip_alpha(1, omega), abs=1e-10)
    assert rho_surface(1, HelixParams(omega, rho1_tangency_alpha(omega))) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(omega=st.floats(1.05, 5.2), alpha=st.floats(0.0, 20.0))
def test_rho1_never_exceeds_one(omega, alpha):
    assert rho_surface(1, HelixParams(omega, alpha)) <= 1.0 + 1e-15


def test_full_tree_examples(conj):
    assert full_tree_feasible(1, conj)
    assert full_tree_feasible(1, HelixParams(math.pi, 1.0))
    assert not full_tree_feasible(1, HelixParams(math.pi, 1.2))


def test_predicate_examples(conj):
    r = in_compact_region(conj)
    assert r.inside and r.failed_constraint is None
    assert r.rho == pytest.approx(0.7841904, abs=1e-7)

    r = in_compact_region(HelixParams(math.pi, 0.2))
    assert not r and r.failed_constraint == "rhok_hypograph" and r.k == 2
    assert r.rho == pytest.approx(1.2287874, abs=1e-7)

    r = in_compact_region(HelixParams(1.0, 0.3))
    assert not r and r.failed_constraint == "omega_window"


def test_predicate_above_tangency():
    # rho stays in the band here, but the point lies above the rho_1 tangency
    p = HelixParams(2.3, 2.0)
    assert GRAHAM_HWANG <= srf(p).rho <= 1.0
    assert in_compact_region(p).failed_constraint == "rho1_hypograph"


def test_predicate_requires_m_max_5():
    with pytest.raises(SpecError):
        in_compact_region(HelixParams(2.0, 0.3), 4)


def test_mask_matches_predicate(rng):
    w = omega_window()
    om = rng.uniform(w.lo - 0.1, w.hi + 0.1, 2000)
    al = rng.uniform(0.0, 2.0, 2000)
    mask, rho = region_mask(om, al)
    for o, a, m in zip(om, al, mask):
        assert bool(m) == in_compact_region(HelixParams(float(o), float(a))).inside


def test_region_points_in_band(rng):
    for p in sample_feasible(rng, 500):
        rho = srf(p).rho
        assert GRAHAM_HWANG <= rho <= 1.0
        assert p.alpha <= rho1_tangency_alpha(p.omega) + 1e-15


def test_region_is_bounded():
    w = omega_window()
    om, al = np.meshgrid(np.linspace(w.lo, w.hi, 300), np.linspace(1e-3, 5.0, 300), indexing="ij")
    mask, _ = region_mask(om, al)
    assert mask.any()
    assert al[mask].max() <= max(rho1_tangency_alpha(float(o)) for o in om[:, 0]) + 1e-12
