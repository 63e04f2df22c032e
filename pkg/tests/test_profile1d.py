import math

import numpy as np
import pytest

from frankmin.core import ElasticConstants
from frankmin.profile1d import (
    ConvergenceError,
    ReducedCoefficients,
    brute_force_1d,
    delta_t,
    eta,
    first_integral_residual,
    minimize_1d,
    phi_profile,
    profile_at,
    restricted_minimum,
    solve_excess,
    solve_first_integral_constant,
    theta_profile,
)

ONE = ElasticConstants.single()
GEN = ElasticConstants(1.0, 2.0, 3.0, 0.0)

# eta(D) = 1 at t = 2.5, one-constant: composite Simpson with 1e6 panels on
# the raw integrand plus bisection to width 1e-12
D_ORACLE_T25 = 6.87614388934467


def simpson_eta(C, t, panels=10**6):
    u = np.linspace(0.0, math.pi / 2, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (math.pi / 2) / panels / 3.0
    return float(np.sum(w / np.sqrt(C - t * t * np.cos(u) ** 2)))


# -- reduced coefficients ---------------------------------------------------------

@pytest.mark.parametrize("K", [ONE, GEN, ElasticConstants(3.0, 0.5, 1.5, 0.0)])
def test_reduced_coefficient_bounds(K):
    c = ReducedCoefficients(K, 1.7)
    u = np.linspace(-math.pi / 2, math.pi / 2, 401)
    assert np.all(c.f(u) >= min(K.k1, K.k3) - 1e-15)
    g = c.g(u)
    assert np.all(g >= 0) and np.all(g <= K.k2 * 1.7**2 * (1 + 1e-15))
    assert c.g(0.0) == pytest.approx(K.k2 * 1.7**2)
    assert abs(c.g(math.pi / 2)) < 1e-28
    assert np.allclose(c.gap(u), K.k2 * 1.7**2 - g, atol=1e-13)


def test_phi_rate_substitution():
    c = ReducedCoefficients(ElasticConstants(1.0, 1.0, 2.0, 0.0), 1.0)
    assert c.phi_rate(math.pi / 2) == pytest.approx(0.5)


# -- eta and the first-integral constant --------------------------------------------

def test_eta_nematic_limit():
    assert eta(math.pi**2 / 4, ONE, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert eta(4.0, ONE, 0.0) == pytest.approx(math.pi / 4, abs=1e-12)


def test_eta_decreasing():
    assert eta(2.5, ONE, 1.0) > eta(3.0, ONE, 1.0)
    cs = np.linspace(1.01, 10.0, 25)
    vals = [eta(c, GEN, 0.7) for c in cs]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_eta_blows_up_at_lower_end():
    # one-constant, t = 1: eta(1 + eps) = int du / sqrt(eps + sin^2 u) ~ log(4 / sqrt(eps)),
    # so the growth is logarithmic: +log(10) per factor 100 in eps
    vals = [eta(1.0 + eps, ONE, 1.0) for eps in (1e-2, 1e-4, 1e-6, 1e-8)]
    steps = np.diff(vals)
    assert np.all(steps > 0)
    assert np.allclose(steps[1:], math.log(10.0), atol=1e-3)
    assert vals[-1] == pytest.approx(math.log(4.0 / 1e-4), abs=1e-6)
    # unbounded: exceeds ten times eta(K2 t^2 + 1) once eps is small enough
    assert eta(1.0 + 1e-12, ONE, 1.0) > 10 * eta(2.0, ONE, 1.0)


def test_eta_domain_error():
    with pytest.raises(ValueError):
        eta(1.0, ONE, 1.0)
    with pytest.raises(ValueError):
        eta(0.5, ONE, 1.0)


def test_eta_matches_simpson_oracle():
    for C in (6.3, 7.0, 12.0):
        assert eta(C, ONE, 2.5) == pytest.approx(simpson_eta(C, 2.5), abs=1e-10)


def test_constant_nematic_limit():
    assert solve_first_integral_constant(ONE, 0.0) == pytest.approx(math.pi**2 / 4, abs=1e-12)


def test_constant_matches_frozen_oracle():
    assert solve_first_integral_constant(ONE, 2.5) == pytest.approx(D_ORACLE_T25, abs=1e-9)


def test_constant_monotone_in_alpha():
    assert solve_first_integral_constant(ONE, 1.0, 0.5) > solve_first_integral_constant(ONE, 1.0, 1.0)


@pytest.mark.parametrize("K, t", [(ONE, 0.0), (ONE, 3.0), (GEN, 1.0), (GEN, 20.0)])
def test_constant_solves_eta(K, t):
    C = solve_first_integral_constant(K, t)
    assert C >= K.k2 * t * t
    # at t = 20 the excess C - K2 t^2 ~ 1e-14 is below the resolution of C
    assert solve_excess(K, t) > 0
    if t < 10:
        assert eta(C, K, t) == pytest.approx(1.0, abs=1e-10)


def test_constant_rejects_bad_alpha():
    with pytest.raises(ValueError):
        solve_first_integral_constant(ONE, 1.0, 0.0)


# -- profiles -------------------------------------------------------------------

def test_theta_nematic_linear():
    p = theta_profile(math.pi**2 / 4, ONE, 0.0, 1001)
    assert np.max(np.abs(p.theta - math.pi / 2 * p.z_nodes)) < 1e-8
    assert p.phi is None


def test_theta_profile_flags_wrong_constant():
    with pytest.raises(ConvergenceError):
        theta_profile(math.pi**2 / 4 * 1.01, ONE, 0.0, 101)


def test_theta_profile_needs_two_nodes():
    with pytest.raises(ValueError):
        theta_profile(math.pi**2 / 4, ONE, 0.0, 1)


@pytest.mark.parametrize("K, t", [(ONE, 0.5), (ONE, 2.5), (ONE, 20.0), (GEN, 1.0), (GEN, 5.0)])
def test_profile_invariants(K, t):
    p = minimize_1d(K, t, 1001)
    assert p.theta[0] == 0.0 and p.theta[-1] == math.pi / 2
    assert np.all(np.diff(p.theta) > 0)
    assert np.all(np.abs(p.theta) <= math.pi / 2)
    assert p.phi[0] == 0.0 and np.all(np.diff(p.phi) >= 0)


def test_large_t_curvature_near_top():
    p = minimize_1d(ONE, 20.0, 1001)
    mid = p.theta[500]
    assert mid < 0.05
    # most of the rise happens in the top tenth of the cell
    assert p.theta[900] < 0.25 * math.pi / 2


def test_small_t_slight_bending():
    p = minimize_1d(ONE, 2.5, 1001)
    lin = math.pi / 2 * p.z_nodes
    dev = np.max(np.abs(p.theta - lin))
    assert 0.01 < dev < 0.5


def test_phi_one_constant_is_tz():
    p = minimize_1d(ONE, 5.0, 1001)
    assert p.phi[-1] == pytest.approx(5.0, abs=1e-8)
    assert np.max(np.abs(p.phi - 5.0 * p.z_nodes)) < 1e-8


def test_phi_zero_without_chirality():
    p = minimize_1d(GEN, 0.0, 201)
    assert np.all(p.phi == 0.0)


def test_phi_general_matches_quadrature():
    p = minimize_1d(GEN, 2.0, 2001)
    c = ReducedCoefficients(GEN, 2.0)
    # independent trapezoid on the nodal theta values
    rate = c.phi_rate(p.theta)
    ref = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(p.z_nodes) * (rate[1:] + rate[:-1]))])
    assert np.max(np.abs(p.phi - ref)) < 1e-5


def test_phi_profile_fills_existing_profile():
    p = theta_profile(solve_first_integral_constant(GEN, 1.0), GEN, 1.0, 501)
    q = phi_profile(p)
    assert q.phi is not None and q.phi[-1] > 0


def test_energy_nematic_limit():
    assert minimize_1d(ONE, 0.0).energy_per_area == pytest.approx(math.pi**2 / 4, abs=1e-12)


def test_negative_chirality_is_reflected():
    a = minimize_1d(ONE, 2.5, 201)
    b = minimize_1d(ONE, -2.5, 201)
    assert b.t == 2.5
    assert np.array_equal(a.theta, b.theta) and a.energy_per_area == b.energy_per_area


def test_restricted_minimum():
    assert restricted_minimum(0.5, ONE, 1.0) > restricted_minimum(1.0, ONE, 1.0)
    assert restricted_minimum(1.0, GEN, 1.0) == pytest.approx(minimize_1d(GEN, 1.0).energy_per_area, rel=1e-14)
    assert restricted_minimum(0.5, ONE, 0.0) == pytest.approx(math.pi**2 / 2, rel=1e-12)


@pytest.mark.parametrize("K", [ONE, GEN])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_lemma_monotonicity(K, t):
    vals = [restricted_minimum(a, K, t) for a in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


# -- diagnostics ----------------------------------------------------------------

def test_residual_linear_profile():
    p = minimize_1d(ONE, 0.0, 1001)
    exact = type(p)(**{**p.__dict__, "theta": math.pi / 2 * p.z_nodes})
    assert first_integral_residual(exact) < 1e-10
    # the integrated profile carries accumulated rounding from 8000 RK4 substeps
    assert first_integral_residual(p) < 1e-9


@pytest.mark.parametrize("K, t", [(ONE, 5.0), (ONE, 20.0), (GEN, 1.0)])
def test_residual_small(K, t):
    assert first_integral_residual(minimize_1d(K, t, 1001)) < 1e-6


def test_residual_detects_tampering():
    p = minimize_1d(ONE, 2.5, 1001)
    theta = p.theta.copy()
    theta[400] += 0.01
    bad = type(p)(**{**p.__dict__, "theta": theta})
    assert first_integral_residual(bad) > 1e-3


def test_residual_converges_at_least_second_order():
    ns = (251, 501, 1001, 2001)
    res = [first_integral_residual(minimize_1d(ONE, 5.0, n)) for n in ns]
    floor = 1e-10
    for (n0, r0), (n1, r1) in zip(zip(ns, res), zip(ns[1:], res[1:])):
        # halving h cuts the error by >= 3.5, until it reaches rounding level
        assert r1 <= max(r0 / 3.5, floor)


def test_one_constant_pointwise_cross_check():
    t = 3.0
    p = minimize_1d(ONE, t, 1001)
    D = p.first_integral_constant
    assert delta_t(p) + t * t == pytest.approx(D, rel=1e-15)
    from frankmin.profile1d import centered_slope
    d = centered_slope(p.theta, p.z_nodes)
    assert np.max(np.abs(d**2 - (D - t * t * np.cos(p.theta) ** 2))) < 1e-6


@pytest.mark.parametrize("t", [0.0, 0.5, 20.0])
def test_delta_window(t):
    d = delta_t(minimize_1d(ONE, t))
    assert 0 < d <= math.pi**2 / 4 * (1 + 1e-12)
    if t == 0:
        assert d == pytest.approx(math.pi**2 / 4, abs=1e-12)


def test_delta_requires_one_constant():
    with pytest.raises(ValueError):
        delta_t(minimize_1d(GEN, 1.0, 101))


# -- brute-force oracle -----------------------------------------------------------

def test_brute_force_nematic():
    p = brute_force_1d(ONE, 0.0, 501)
    assert np.max(np.abs(p.theta - math.pi / 2 * p.z_nodes)) < 1e-10
    assert p.energy_per_area == pytest.approx(math.pi**2 / 4, rel=1e-12)


def test_brute_force_matches_shooting_nodally():
    a = brute_force_1d(ONE, 2.5, 2001)
    b = minimize_1d(ONE, 2.5, 2001)
    assert np.max(np.abs(a.theta - b.theta)) < 1e-4
    assert a.energy_per_area == pytest.approx(b.energy_per_area, rel=1e-4)


def test_brute_force_large_t_energy():
    a = brute_force_1d(ONE, 10.0, 2001)
    b = minimize_1d(ONE, 10.0, 2001)
    assert a.energy_per_area == pytest.approx(b.energy_per_area, rel=1e-4)


def test_brute_force_iteration_cap():
    with pytest.raises(ConvergenceError):
        brute_force_1d(GEN, 5.0, 501, max_iter=1)


def test_profile_interpolation():
    p = minimize_1d(ONE, 1.0, 11)
    th, ph = profile_at(p, [0.0, 0.05, 1.0])
    assert th[0] == 0.0 and th[2] == math.pi / 2
    assert th[1] == pytest.approx(0.5 * (p.theta[0] + p.theta[1]))
    assert ph[2] == pytest.approx(1.0)
