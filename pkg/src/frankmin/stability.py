"""Coercivity constants and the energy-splitting functional.

For the one-constant energy the excess over a reference critical point
``n*`` splits as ``I(n) - I(n*) = H(n - n*)`` with

    H(v) = int |grad v|^2 + 2t v.curl v - lambda |v|^2,

``lambda = |grad n*|^2 + 2t n*.curl n*`` (zero for ``n* = e3``). Bounding the
curl by ``sqrt(2)|grad v|``, splitting the cross term with Cauchy's
inequality (weight ``eps = c t``) and applying the sharp Poincare constant
``pi^2`` of the unit slab gives ``H(v) >= gamma_t int |v|^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainSpec, ElasticConstants, as_chirality, curl
from .field3d import BoundaryCondition, DirectorGrid, discrete_energy, pointwise_lambda, stencils_for
from .profile1d import EulerProfile, delta_t

SQRT2 = math.sqrt(2.0)
PI2 = math.pi**2
# Cauchy weight eps = 4t used for the closed forms
DEFAULT_SLOPE = 4.0


@dataclass(frozen=True)
class StabilityConstants:
    gamma_t: float
    threshold_frustrated: float
    threshold_homeotropic: float
    cauchy_eps_optimal: float


def gamma_bound(t, slope: float = DEFAULT_SLOPE, bc="frustrated") -> float:
    """Coercivity constant for Cauchy weight ``eps = slope * t``.

    ``pi^2 (1 - sqrt2/slope) - s - t^2 sqrt2 slope`` with ``s = pi^2/4 + t^2``
    for the frustrated cell and ``s = 0`` for homeotropic anchoring.
    """
    t = float(as_chirality(t))
    if slope <= SQRT2:
        raise ValueError("the gradient coefficient 1 - sqrt(2)/slope must stay positive")
    shift = PI2 / 4 + t * t if BoundaryCondition.parse(bc) is BoundaryCondition.FRUSTRATED else 0.0
    return PI2 * (1.0 - SQRT2 / slope) - shift - SQRT2 * slope * t * t


def gamma_frustrated(t) -> float:
    t = float(as_chirality(t))
    return PI2 * (1.0 - 1.0 / (2.0 * SQRT2)) - (PI2 / 4 + t * t + 4.0 * SQRT2 * t * t)


def gamma_homeotropic(t) -> float:
    t = float(as_chirality(t))
    return PI2 * (1.0 - 1.0 / (2.0 * SQRT2)) - 4.0 * SQRT2 * t * t


def quadratic_coefficient() -> float:
    """Coefficient of ``-t^2`` in :func:`gamma_frustrated`."""
    return 1.0 + 4.0 * SQRT2


def threshold_frustrated(slope: float = DEFAULT_SLOPE) -> float:
    """Positive root of :func:`gamma_bound` for the frustrated cell."""
    num = PI2 * (0.75 - SQRT2 / slope)
    return math.sqrt(num / (1.0 + SQRT2 * slope)) if num > 0 else 0.0


def threshold_homeotropic(slope: float = DEFAULT_SLOPE) -> float:
    num = PI2 * (1.0 - SQRT2 / slope)
    return math.sqrt(num / (SQRT2 * slope))


def optimal_cauchy_eps(t) -> float:
    """Cauchy weight maximizing the frustrated threshold, ``(4 sqrt2 + 2 sqrt11) t / 3``."""
    t = float(as_chirality(t))
    return (4.0 * SQRT2 / 3.0 + 2.0 * math.sqrt(11.0) / 3.0) * t


def stability_constants(t) -> StabilityConstants:
    return StabilityConstants(
        gamma_t=gamma_frustrated(t),
        threshold_frustrated=threshold_frustrated(),
        threshold_homeotropic=threshold_homeotropic(),
        cauchy_eps_optimal=optimal_cauchy_eps(1.0),
    )


def lambda_field(profile: EulerProfile, t, dims) -> np.ndarray:
    """``delta_t - t^2 + 2 t^2 sin^2 theta`` on the grid's z-levels (shape ``(nz,)``)."""
    t = float(as_chirality(t))
    nz = dims[2] if len(dims) == 3 else dims[0]
    z = np.linspace(0.0, 1.0, nz)
    theta = np.interp(z, profile.z_nodes, profile.theta)
    return delta_t(profile) - t * t + 2.0 * t * t * np.sin(theta) ** 2


def _as_field(v, domain):
    if isinstance(v, DirectorGrid):
        return v.values, v.domain
    if domain is None:
        raise ValueError("a DomainSpec is needed for raw arrays")
    return np.asarray(v, dtype=float), domain


def _mid_level_lambda(lam, st):
    lam = np.asarray(lam, dtype=float)
    nx, ny, nz = st.dims
    if lam.ndim == 0:
        return lam
    if lam.ndim == 1:
        if lam.shape[0] == nz:
            lam = 0.5 * (lam[1:] + lam[:-1])
        if lam.shape[0] != nz - 1:
            raise ValueError("a lambda profile needs nz or nz - 1 values")
        return np.broadcast_to(lam, (nx, ny, nz - 1))
    if lam.shape == (nx, ny, nz):
        return st.mid(lam)
    if lam.shape == (nx, ny, nz - 1):
        return lam
    raise ValueError(f"cannot use lambda of shape {lam.shape}")


def h_functional(v, lam=None, t=0.0, domain: DomainSpec | None = None) -> float:
    """Quadrature of ``|grad v|^2 + 2t v.curl v - lambda |v|^2``.

    ``v`` is a ``(nx, ny, nz, 3)`` difference field vanishing on both plates.
    ``lam`` is ``None`` (zero), a scalar, a z-profile sampled on the ``nz``
    levels or the ``nz - 1`` mid-levels, or a full nodal / mid-level field.
    """
    v, domain = _as_field(v, domain)
    face = max(np.max(np.abs(v[:, :, 0])), np.max(np.abs(v[:, :, -1])))
    if face > 1e-10:
        raise ValueError(f"v must vanish on the plates (max {face:.2e})")
    t = float(as_chirality(t))
    st = stencils_for(v.shape[:3], domain)
    grad = st.gradient(v)
    dens = (np.einsum("...ij,...ij->...", grad, grad)
            + 2.0 * t * np.einsum("...i,...i->...", st.mid(v), curl(grad)))
    if lam is not None:
        dens = dens - _mid_level_lambda(lam, st) * st.mid(np.einsum("...i,...i->...", v, v))
    return st.integrate(dens)


def splitting_residual(n: DirectorGrid, nstar: DirectorGrid, t, lam=None) -> float:
    """``|H(n - n*) - (I(n) - I(n*))|`` with identical stencils on both sides.

    ``lam`` defaults to zero for homeotropic anchoring and to
    ``|grad n*|^2 + 2t n*.curl n*`` evaluated on ``nstar`` otherwise.
    """
    if n.dims != nstar.dims or n.bc is not nstar.bc:
        raise ValueError("grids must share dimensions and boundary condition")
    t = as_chirality(t)
    K = ElasticConstants.single()
    if lam is None and n.bc is BoundaryCondition.FRUSTRATED:
        lam = pointwise_lambda(nstar, t)
    h = h_functional(n.values - nstar.values, lam, t, n.domain)
    diff = discrete_energy(n, K, t) - discrete_energy(nstar, K, t)
    return abs(h - diff)


def bound_chain_sides(v, t, domain: DomainSpec, slope: float = DEFAULT_SLOPE):
    """Both sides of the intermediate inequality before the Poincare step.

    Returns ``(lhs, rhs)`` with
    ``lhs = int |grad v|^2 + 2t v.curl v - (pi^2/4 + t^2)|v|^2`` and
    ``rhs = (1 - sqrt2/slope) int |grad v|^2 - (pi^2/4 + t^2 + sqrt2 slope t^2) int |v|^2``.
    """
    v, domain = _as_field(v, domain)
    t = float(as_chirality(t))
    st = stencils_for(v.shape[:3], domain)
    grad = st.gradient(v)
    grad2 = st.integrate(np.einsum("...ij,...ij->...", grad, grad))
    twist = st.integrate(np.einsum("...i,...i->...", st.mid(v), curl(grad)))
    mass = st.integrate(st.mid(np.einsum("...i,...i->...", v, v)))
    shift = PI2 / 4 + t * t
    lhs = grad2 + 2.0 * t * twist - shift * mass
    rhs = (1.0 - SQRT2 / slope) * grad2 - (shift + SQRT2 * slope * t * t) * mass
    return lhs, rhs


def scan(t_min: float = 0.0, t_max: float = 1.5, steps: int = 150):
    """Rows ``(t, gamma_frustrated, gamma_homeotropic)`` on a uniform grid of ``steps + 1`` points.

    ``t_min == t_max`` gives one row.
    """
    if steps < 0 or t_max < t_min or t_min < 0:
        raise ValueError("need 0 <= t_min <= t_max and steps >= 0")
    # a degenerate range is a single evaluation, whatever the step count
    ts = np.linspace(t_min, t_max, steps + 1) if steps > 0 and t_max > t_min else np.array([t_min])
    return [(float(t), gamma_frustrated(t), gamma_homeotropic(t)) for t in ts]
