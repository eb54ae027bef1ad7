import math
import random

import numpy as np
import pytest
from scipy.special import j0

from eclift.errors import Infeasible, PoleCollision
from eclift.sphere_curve import (
    POLE_MARGIN, SphereCurveParams, adaptive_length, curve_area, curve_length, gauss_legendre_nodes, solve_curve,
)


def test_gauss_legendre_nodes_integrate_polynomials():
    x, w = gauss_legendre_nodes(0.0, 2.0, 4)
    assert np.dot(w, x ** 7) == pytest.approx(2 ** 8 / 8)
    assert w.sum() == pytest.approx(2.0)


def test_latitude_circle_area_and_length():
    phi0 = 1.1
    params = SphereCurveParams(phi0, 0.0, 3)
    assert curve_area(params) == pytest.approx(2 * math.pi * (1 - math.cos(phi0)), abs=1e-12)
    assert curve_length(params) == pytest.approx(2 * math.pi * math.sin(phi0), abs=1e-12)


@pytest.mark.parametrize("phi0, amp, k", [(1.0, 0.3, 3), (math.pi / 2, 0.7, 4), (2.0, 0.2, 2)])
def test_area_matches_bessel_closed_form(phi0, amp, k):
    # the mean of cos(phi0 + amp*cos(kx)) over a period is cos(phi0) * J0(amp)
    params = SphereCurveParams(phi0, amp, k)
    assert curve_area(params) == pytest.approx(2 * math.pi * (1 - math.cos(phi0) * j0(amp)), abs=1e-12)


def test_circle_case_sqrt2_class():
    a_star, l_star = 4 * math.pi / 3, 4 * math.pi * math.sqrt(2) / 3
    params = solve_curve(a_star, l_star, 3)
    assert params.phi0 == pytest.approx(math.acos(1 / 3), abs=1e-12)
    assert params.amp == 0.0


def test_balanced_case_hexagonal_class():
    a_star, l_star = 2 * math.pi, 2 * math.pi * math.sqrt(3)
    params = solve_curve(a_star, l_star, 3)
    assert params.phi0 == pytest.approx(math.pi / 2)
    assert curve_length(params) == pytest.approx(l_star, abs=1e-8)
    assert params.avoids_poles()


def test_general_case_newton():
    # tau' = 0.3 + 0.6i: feasible, not a circle
    a_star, l_star = 4 * math.pi * 0.3, 4 * math.pi * 0.6
    params = solve_curve(a_star, l_star, 3)
    assert curve_area(params) == pytest.approx(a_star, abs=1e-8)
    assert curve_length(params) == pytest.approx(l_star, abs=1e-8)
    assert params.amp > 0
    assert params.avoids_poles()


def test_infeasible_targets():
    with pytest.raises(Infeasible):
        solve_curve(math.pi, 0.1, 3)
    with pytest.raises(Infeasible):
        solve_curve(7.0, 10.0, 3)


def test_pole_collision_for_long_balanced_curve():
    with pytest.raises(PoleCollision):
        solve_curve(2 * math.pi, 40.0, 2)


def test_wobble_count_validated():
    with pytest.raises(ValueError):
        solve_curve(2 * math.pi, 2 * math.pi, 1)


# tau' = 1/2 + i*sqrt(35)/2, the class of y^2 = x^3 + x + 4 over F_11
NEAR_POLE_L_STAR = 2 * math.pi * math.sqrt(35)


@pytest.mark.parametrize("k", range(2, 13))
def test_balanced_solve_fails_only_by_pole_collision(k):
    try:
        params = solve_curve(2 * math.pi, NEAR_POLE_L_STAR, k)
    except PoleCollision:
        # the wobble amplitude this k would need crowds a pole
        assert 4 * k * (math.pi / 2 - POLE_MARGIN) < NEAR_POLE_L_STAR
        return
    assert params.pole_distance() >= POLE_MARGIN
    assert curve_length(params) == pytest.approx(NEAR_POLE_L_STAR, abs=1e-8)
    assert curve_length(params, panels=2 ** 17) == pytest.approx(NEAR_POLE_L_STAR, abs=1e-8)


def test_near_pole_class_solves_for_some_wobble():
    solved = []
    for k in range(3, 13):
        try:
            solved.append(solve_curve(2 * math.pi, NEAR_POLE_L_STAR, k))
        except PoleCollision:
            continue
    assert solved
    assert all(params.k >= 6 for params in solved)


def test_length_near_pole_matches_fine_rule():
    # passes within 0.028 rad of both poles
    params = SphereCurveParams(math.pi / 2, 1.5431328399530464, 6)
    length, err = adaptive_length(params)
    assert err < 1e-10
    assert length == pytest.approx(curve_length(params, panels=2 ** 17), abs=1e-10)
    assert curve_length(params) == length


@pytest.mark.parametrize("phi0, amp, k", [(1.0, 0.3, 3), (math.pi / 2, 0.7, 4), (2.0, 0.2, 2), (1.2, 0.4, 3)])
def test_length_stable_under_panel_doubling(phi0, amp, k):
    params = SphereCurveParams(phi0, amp, k)
    coarse = curve_length(params, panels=64 * k)
    assert curve_length(params, panels=128 * k) == pytest.approx(coarse, abs=1e-12)
    assert curve_length(params) == pytest.approx(coarse, abs=1e-11)


@pytest.mark.parametrize("phi0", [math.pi / 6, math.pi / 4, math.pi / 3, math.pi / 2])
def test_zero_amplitude_closed_forms(phi0):
    params = SphereCurveParams(phi0, 0.0, 4)
    assert curve_area(params) == pytest.approx(2 * math.pi * (1 - math.cos(phi0)), abs=1e-12)
    assert curve_length(params) == pytest.approx(2 * math.pi * math.sin(phi0), abs=1e-12)


def test_isoperimetric_inequality_on_random_curves():
    rng = random.Random(7)
    for _ in range(100):
        k = rng.randint(2, 8)
        phi0 = rng.uniform(0.3, math.pi - 0.3)
        amp = rng.uniform(0.0, min(phi0, math.pi - phi0) - 0.05)
        params = SphereCurveParams(phi0, amp, k)
        area, length = curve_area(params), curve_length(params)
        assert length ** 2 >= area * (4 * math.pi - area) - 1e-9
