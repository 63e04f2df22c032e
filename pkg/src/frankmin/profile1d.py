"""One-dimensional minimizers of the reduced Oseen-Frank energy.

For directors depending on ``z`` alone, written with Euler angles
``n = (cos phi cos theta, sin phi cos theta, sin theta)``, the optimal
azimuth satisfies ``phi' = K2 t / (K2 cos^2 theta + K3 sin^2 theta)`` and the
energy per unit cross-section reduces to

    int_0^1 f(theta) theta'^2 - g(theta) + K2 t^2 dz,

    f(u) = K1 cos^2 u + K3 sin^2 u,
    g(u) = K2^2 t^2 cos^2 u / (K2 cos^2 u + K3 sin^2 u).

The minimizer obeys the first integral ``f theta'^2 + g = C`` with ``C``
fixed by ``eta(C) = 1``.

Numerically everything is parametrized by the *excess* ``C - K2 t^2``
rather than ``C``: at large ``t`` the excess decays like ``exp(-2t)`` and
drops below the resolution of ``C`` itself (at ``t = 20`` it is ~1e-14
against ``C ~ 400``). ``C - g(u)`` is evaluated as
``excess + gap(u)`` with ``gap = K2 t^2 - g`` written without cancellation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solveh_banded, LinAlgError
from scipy.optimize import brentq

from .core import ElasticConstants, as_chirality

HALF_PI = 0.5 * math.pi
ETA_TOL = 1e-10
ENDPOINT_TOL = 1e-6
RK4_SUBSTEPS = 8


class ConvergenceError(RuntimeError):
    """A solver failed to reach its tolerance."""


@dataclass(frozen=True)
class EulerProfile:
    z_nodes: np.ndarray
    theta: np.ndarray
    phi: np.ndarray | None
    first_integral_constant: float
    energy_per_area: float | None
    excess: float
    K: ElasticConstants
    t: float
    alpha: float = 1.0

    @property
    def n_nodes(self) -> int:
        return len(self.z_nodes)

    def metadata(self) -> dict:
        meta = dict(self.K.as_dict())
        meta.update(
            t=self.t,
            C=self.first_integral_constant,
            excess=self.excess,
            energy_per_area=self.energy_per_area,
            n_nodes=self.n_nodes,
        )
        return meta


class ReducedCoefficients:
    """The coefficient functions ``f``, ``g`` and ``gap = K2 t^2 - g``."""

    def __init__(self, K: ElasticConstants, t):
        self.K = K
        self.t = float(as_chirality(t))
        self.floor = K.k2 * self.t**2

    def f(self, u):
        c2 = np.cos(u) ** 2
        return self.K.k1 * c2 + self.K.k3 * (1.0 - c2)

    def _denominator(self, u):
        c2 = np.cos(u) ** 2
        return self.K.k2 * c2 + self.K.k3 * (1.0 - c2)

    def g(self, u):
        return self.K.k2**2 * self.t**2 * np.cos(u) ** 2 / self._denominator(u)

    def gap(self, u):
        return self.K.k2 * self.K.k3 * self.t**2 * np.sin(u) ** 2 / self._denominator(u)

    def phi_rate(self, u):
        return self.K.k2 * self.t / self._denominator(u)

    def slope(self, u, excess):
        """``theta'`` from the first integral."""
        return np.sqrt((excess + self.gap(u)) / self.f(u))

    def lagrangian_slope_form(self, u, excess):
        # f theta'^2 - g + K2 t^2 with theta' from the first integral
        return excess + 2.0 * self.gap(u)


def _eta_excess(excess: float, coeffs: ReducedCoefficients, upper: float = HALF_PI) -> float:
    if not excess > 0:
        raise ValueError("eta is only defined for C > K2 t^2")
    a = coeffs.K.k3 * coeffs.t**2
    if a == 0.0:
        val, _ = quad(lambda u: math.sqrt(coeffs.f(u) / excess), 0.0, upper,
                      epsabs=1e-13, epsrel=1e-13, limit=200)
        return val
    # u = b sinh(s) absorbs the 1/sqrt(excess + a u^2) peak at u = 0
    b = math.sqrt(excess / a)
    s_max = math.asinh(upper / b)

    def integrand(s):
        u = b * math.sinh(s)
        return math.sqrt(coeffs.f(u)) * b * math.cosh(s) / math.sqrt(excess + coeffs.gap(u))

    val, _ = quad(integrand, 0.0, s_max, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val


def eta(C: float, K: ElasticConstants, t) -> float:
    """``int_0^{pi/2} sqrt(f(u)) / sqrt(C - g(u)) du``; needs ``C > K2 t^2``."""
    coeffs = ReducedCoefficients(K, t)
    excess = C - coeffs.floor
    if not excess > 0:
        raise ValueError(f"eta needs C > K2 t^2 = {coeffs.floor}, got C = {C}")
    return _eta_excess(excess, coeffs)


def eta_from_excess(excess: float, K: ElasticConstants, t) -> float:
    return _eta_excess(excess, ReducedCoefficients(K, t))


def solve_excess(K: ElasticConstants, t, alpha: float = 1.0) -> float:
    """Excess ``C - K2 t^2`` solving ``eta(C) = alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    coeffs = ReducedCoefficients(K, t)

    def resid(log_excess):
        return _eta_excess(math.exp(log_excess), coeffs) - alpha

    lo = 0.0
    while resid(lo) <= 0:
        lo -= 4.0
        if lo < -700:
            raise ConvergenceError("could not bracket the first-integral constant from below")
    hi = 0.0
    while resid(hi) >= 0:
        hi += math.log(2.0)
        if hi > 700:
            raise ConvergenceError("could not bracket the first-integral constant from above")
    log_root = brentq(resid, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    excess = math.exp(log_root)
    if abs(_eta_excess(excess, coeffs) - alpha) > ETA_TOL:
        raise ConvergenceError("root refinement missed |eta(C) - alpha| <= 1e-10")
    return excess


def solve_first_integral_constant(K: ElasticConstants, t, alpha: float = 1.0) -> float:
    """Unique ``C`` with ``eta(C) = alpha``."""
    coeffs = ReducedCoefficients(K, t)
    return coeffs.floor + solve_excess(K, t, alpha)


def _rk4_step(rate, y, h):
    k1 = rate(y)
    k2 = rate(y + 0.5 * h * k1)
    k3 = rate(y + 0.5 * h * k2)
    k4 = rate(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), (y, y + 0.5 * h * k1, y + 0.5 * h * k2, y + h * k3)


def _integrate_theta(coeffs, excess, length, n_nodes, substeps):
    z = np.linspace(0.0, length, n_nodes)
    h = length / (n_nodes - 1) / substeps
    theta = np.empty(n_nodes)
    theta[0] = 0.0
    y = 0.0

    def rate(u):
        return math.sqrt((excess + coeffs.gap(u)) / coeffs.f(u))

    for i in range(1, n_nodes):
        for _ in range(substeps):
            y, _ = _rk4_step(rate, y, h)
        theta[i] = y
    return z, theta


def _profile_from_excess(K, t, excess, alpha, n_nodes, substeps):
    coeffs = ReducedCoefficients(K, t)
    z, theta = _integrate_theta(coeffs, excess, alpha, n_nodes, substeps)
    miss = abs(theta[-1] - HALF_PI)
    if miss > ENDPOINT_TOL:
        raise ConvergenceError(f"theta(end) misses pi/2 by {miss:.3e}")
    theta[-1] = HALF_PI
    return EulerProfile(
        z_nodes=z,
        theta=theta,
        phi=None,
        first_integral_constant=coeffs.floor + excess,
        energy_per_area=None,
        excess=excess,
        K=K,
        t=coeffs.t,
        alpha=alpha,
    )


def theta_profile(C: float, K: ElasticConstants, t, n_nodes: int = 1001, *,
                  excess: float | None = None, substeps: int = 8) -> EulerProfile:
    """Integrate ``theta' = sqrt((C - g) / f)`` from ``theta(0) = 0`` with RK4.

    ``substeps`` RK4 steps are taken between consecutive output nodes.
    Pass ``excess`` (= ``C - K2 t^2``) to avoid losing it to rounding when
    ``t`` is large; it overrides ``C``.
    """
    if n_nodes < 2:
        raise ValueError("need at least two nodes")
    coeffs = ReducedCoefficients(K, t)
    if excess is None:
        excess = C - coeffs.floor
    return _profile_from_excess(K, t, excess, 1.0, n_nodes, substeps)


def phi_profile(profile: EulerProfile, K: ElasticConstants | None = None, t=None,
                substeps: int = 8) -> EulerProfile:
    """Fill ``phi`` by integrating ``phi' = K2 t / (K2 cos^2 + K3 sin^2)``.

    Reuses the RK4 stages of the theta integration so both angles advance
    as one coupled system.
    """
    K = profile.K if K is None else K
    t = profile.t if t is None else float(as_chirality(t))
    coeffs = ReducedCoefficients(K, t)
    excess = profile.excess
    z = profile.z_nodes
    phi = np.zeros_like(z)
    if t == 0.0:
        return replace(profile, phi=phi)

    def rate(u):
        return math.sqrt((excess + coeffs.gap(u)) / coeffs.f(u))

    if K.k2 == K.k3:
        # phi' = t exactly
        return replace(profile, phi=coeffs.phi_rate(0.0) * z)
    for i in range(1, len(z)):
        h = (z[i] - z[i - 1]) / substeps
        y = profile.theta[i - 1]
        acc = phi[i - 1]
        for _ in range(substeps):
            y_next, stages = _rk4_step(rate, y, h)
            p = [coeffs.phi_rate(s) for s in stages]
            acc += (h / 6.0) * (p[0] + 2.0 * p[1] + 2.0 * p[2] + p[3])
            y = y_next
        phi[i] = acc
    return replace(profile, phi=phi)


def _trapezoid(y, x):
    return float(np.trapezoid(y, x))


def reduced_energy(profile: EulerProfile) -> float:
    """``int f theta'^2 - g + K2 t^2`` with ``theta'`` from the first integral."""
    coeffs = ReducedCoefficients(profile.K, profile.t)
    return _trapezoid(coeffs.lagrangian_slope_form(profile.theta, profile.excess), profile.z_nodes)


def minimize_1d(K: ElasticConstants, t, n_nodes: int = 1001) -> EulerProfile:
    """Global minimizer among ``z``-only directors with ``theta(0) = 0``, ``theta(1) = pi/2``."""
    excess = solve_excess(K, t, 1.0)
    profile = _profile_from_excess(K, t, excess, 1.0, n_nodes, RK4_SUBSTEPS)
    profile = phi_profile(profile)
    return replace(profile, energy_per_area=reduced_energy(profile))


def restricted_minimum(alpha: float, K: ElasticConstants, t, n_nodes: int = 1001) -> float:
    """Minimum of the reduced functional on ``[0, alpha]`` with ``v(alpha) = pi/2``."""
    excess = solve_excess(K, t, alpha)
    profile = _profile_from_excess(K, t, excess, alpha, n_nodes, RK4_SUBSTEPS)
    return reduced_energy(profile)


def _fd_weights(offsets):
    """First-derivative weights on integer ``offsets`` (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    m = len(offsets)
    vander = np.vander(offsets, m, increasing=True).T
    rhs = np.zeros(m)
    rhs[1] = 1.0
    return np.linalg.solve(vander, rhs)


def centered_slope(theta: np.ndarray, z: np.ndarray, order: int = 6) -> np.ndarray:
    """Finite-difference ``theta'`` on a uniform grid.

    Centered ``order + 1``-point stencils in the interior, shifted one-sided
    stencils of the same width near the ends. ``order=2`` gives the classic
    three-point formulas.
    """
    h = z[1] - z[0]
    n = len(theta)
    width = order + 1
    if n < width:
        raise ValueError(f"need at least {width} nodes for order {order}")
    half = order // 2
    d = np.empty_like(theta)
    w = _fd_weights(np.arange(-half, half + 1))
    d[half:n - half] = sum(w[j] * theta[j:n - order + j] for j in range(width)) / h
    for i in list(range(half)) + list(range(n - half, n)):
        start = min(max(i - half, 0), n - width)
        offs = np.arange(start, start + width) - i
        d[i] = np.dot(_fd_weights(offs), theta[start:start + width]) / h
    return d


def first_integral_residual(profile: EulerProfile, K: ElasticConstants | None = None,
                            t=None) -> float:
    """``max |f theta'^2 + g - C|`` over interior nodes, ``theta'`` by differences.

    Sixth-order stencils keep the differentiation error below the
    integrator error at 1001 nodes even for ``t = 20``.
    """
    K = profile.K if K is None else K
    t = profile.t if t is None else t
    coeffs = ReducedCoefficients(K, t)
    d = centered_slope(profile.theta, profile.z_nodes)[1:-1]
    th = profile.theta[1:-1]
    # f d^2 + g - C = f d^2 - gap - excess, avoiding the large K2 t^2 terms
    r = coeffs.f(th) * d * d - coeffs.gap(th) - profile.excess
    return float(np.max(np.abs(r)))


def delta_t(profile: EulerProfile, t=None) -> float:
    """``D - t^2`` for a one-constant profile; must lie in ``(0, pi^2/4]``."""
    if not profile.K.one_constant:
        raise ValueError("delta_t is defined for one-constant profiles")
    delta = profile.excess / profile.K.k1
    if not 0.0 < delta <= math.pi**2 / 4 * (1 + 1e-12):
        raise ConvergenceError(f"delta_t = {delta!r} outside (0, pi^2/4]: solver bug")
    return delta


def _discrete_lagrangian(theta, h, coeffs):
    """Midpoint discretization of the reduced functional plus its derivatives.

    Returns energy, gradient and the tridiagonal Hessian (diagonal,
    off-diagonal) with respect to all nodal values.
    """
    a, b = theta[:-1], theta[1:]
    m = 0.5 * (a + b)
    d = (b - a) / h
    K = coeffs.K
    t2 = coeffs.t**2
    c, s = np.cos(m), np.sin(m)
    c2, s2, sc = c * c, s * s, s * c
    f = K.k1 * c2 + K.k3 * s2
    fp = 2.0 * (K.k3 - K.k1) * sc
    fpp = 2.0 * (K.k3 - K.k1) * (c2 - s2)
    q = K.k2 * c2 + K.k3 * s2
    qp = 2.0 * (K.k3 - K.k2) * sc
    qpp = 2.0 * (K.k3 - K.k2) * (c2 - s2)
    # gap(m) = K2 K3 t^2 s^2 / q
    num = K.k2 * K.k3 * t2 * s2
    nump = K.k2 * K.k3 * t2 * 2.0 * sc
    numpp = K.k2 * K.k3 * t2 * 2.0 * (c2 - s2)
    gap = num / q
    gapp = (nump * q - num * qp) / q**2
    gappp = (numpp * q**2 - num * qpp * q - 2.0 * qp * (nump * q - num * qp)) / q**3
    # L = f d^2 + gap (constant K2 t^2 - g = gap)
    cell = f * d * d + gap
    energy = float(h * np.sum(cell))
    dL_dm = fp * d * d + gapp
    dL_dd = 2.0 * f * d
    # derivatives of h * L w.r.t. a and b: dm/da = dm/db = 1/2, dd/da = -1/h, dd/db = 1/h
    ga = h * 0.5 * dL_dm - dL_dd
    gb = h * 0.5 * dL_dm + dL_dd
    grad = np.zeros_like(theta)
    grad[:-1] += ga
    grad[1:] += gb
    Lmm = fpp * d * d + gappp
    Lmd = 2.0 * fp * d
    Ldd = 2.0 * f
    haa = h * 0.25 * Lmm - 0.5 * Lmd * 2 + Ldd / h
    hbb = h * 0.25 * Lmm + 0.5 * Lmd * 2 + Ldd / h
    hab = h * 0.25 * Lmm - Ldd / h
    diag = np.zeros_like(theta)
    diag[:-1] += haa
    diag[1:] += hbb
    return energy, grad, diag, hab


def brute_force_1d(K: ElasticConstants, t, n_nodes: int = 2001, *, grad_tol: float = 1e-9,
                   max_iter: int = 500) -> EulerProfile:
    """Direct minimization of the discretized reduced functional over nodal theta.

    Independent of the first-integral route. Starts from ``theta = pi z / 2``
    and takes Newton-preconditioned descent steps with a backtracking line
    search (steepest descent when the Hessian is not positive definite)
    until the interior gradient's infinity norm is below ``grad_tol``.
    """
    coeffs = ReducedCoefficients(K, t)
    z = np.linspace(0.0, 1.0, n_nodes)
    h = z[1] - z[0]
    theta = HALF_PI * z
    energy, grad, diag, off = _discrete_lagrangian(theta, h, coeffs)
    for it in range(max_iter):
        g = grad[1:-1]
        if np.max(np.abs(g)) < grad_tol:
            break
        ab = np.zeros((2, n_nodes - 2))
        ab[0, 1:] = off[1:-1]
        ab[1, :] = diag[1:-1]
        try:
            step = -solveh_banded(ab, g)
        except LinAlgError:
            step = -g / h
        if np.dot(step, g) >= 0:
            step = -g / h
        lam = 1.0
        for _ in range(60):
            trial = theta.copy()
            trial[1:-1] += lam * step
            e_trial, *_ = _discrete_lagrangian(trial, h, coeffs)
            if e_trial <= energy + 1e-4 * lam * np.dot(step, g):
                break
            lam *= 0.5
        else:
            # no decrease possible at this precision: stationary to rounding
            break
        theta = trial
        energy, grad, diag, off = _discrete_lagrangian(theta, h, coeffs)
    else:
        raise ConvergenceError(f"brute_force_1d: no convergence in {max_iter} iterations")
    # phi by trapezoid on phi' = K2 t / q(theta)
    rate = coeffs.phi_rate(theta)
    phi = np.concatenate([[0.0], np.cumsum(0.5 * h * (rate[1:] + rate[:-1]))])
    mid = 0.5 * (theta[1:] + theta[:-1])
    d = np.diff(theta) / h
    excess_est = float(np.mean(coeffs.f(mid) * d * d - coeffs.gap(mid)))
    return EulerProfile(
        z_nodes=z,
        theta=theta,
        phi=phi,
        first_integral_constant=coeffs.floor + excess_est,
        energy_per_area=energy,
        excess=excess_est,
        K=K,
        t=coeffs.t,
    )


def profile_at(profile: EulerProfile, z) -> tuple[np.ndarray, np.ndarray]:
    """Linear interpolation of ``(theta, phi)`` at heights ``z``."""
    z = np.asarray(z, dtype=float)
    theta = np.interp(z, profile.z_nodes, profile.theta)
    phi = profile.phi if profile.phi is not None else np.zeros_like(profile.theta)
    return theta, np.interp(z, profile.z_nodes, phi)
