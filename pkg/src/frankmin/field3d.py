"""Three-dimensional director fields on the periodic cuboid cell.

Nodes: ``x_i = -l1 + i * 2 l1 / nx`` (periodic, no duplicated seam node),
likewise in ``y``, and ``z_k = k / (nz - 1)`` including both plates.
The energy density lives on the mid-levels ``z_{k+1/2}``: x/y derivatives
are periodic centered differences averaged over the two adjacent levels,
z derivatives are one-cell differences, and the integral is the midpoint
rule in ``z`` with uniform weights in ``x, y``. :func:`discrete_gradient`
is the exact derivative of :func:`discrete_energy` built from the transposed
stencils, so the two are consistent to rounding.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    FILE_UNIT_TOL,
    DomainSpec,
    ElasticConstants,
    as_chirality,
    curl,
    density_partials,
    director_from_angles,
    saddle_splay_density,
)
from .profile1d import EulerProfile, profile_at

E1 = np.array([1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

MAX_MODE_XY = 3
MAX_MODE_Z = 2


class BoundaryCondition(enum.Enum):
    FRUSTRATED = "frustrated"
    HOMEOTROPIC = "homeotropic"

    @property
    def bottom(self) -> np.ndarray:
        return E1 if self is BoundaryCondition.FRUSTRATED else E3

    @property
    def top(self) -> np.ndarray:
        return E3

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True, eq=False)
class DirectorGrid:
    """Sphere-valued field sampled on the cell, ``values.shape == (nx, ny, nz, 3)``."""

    values: np.ndarray
    domain: DomainSpec = field(default_factory=DomainSpec)
    bc: BoundaryCondition = BoundaryCondition.FRUSTRATED

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 4 or values.shape[-1] != 3 or min(values.shape[:3]) < 2:
            raise ValueError(f"values must have shape (nx, ny, nz, 3), got {values.shape}")
        if values.shape[2] < 3:
            raise ValueError("need nz >= 3 so the cell has an interior layer")
        norms = np.linalg.norm(values, axis=-1)
        if np.max(np.abs(norms - 1.0)) > FILE_UNIT_TOL:
            raise ValueError("director values must be unit vectors")
        if not (np.all(values[:, :, 0] == self.bc.bottom) and np.all(values[:, :, -1] == self.bc.top)):
            raise ValueError(f"plate layers do not match the {self.bc.value} boundary condition")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.values.shape[:3]

    def spacing(self) -> tuple[float, float, float]:
        return grid_spacing(self.dims, self.domain)

    def coordinates(self):
        return grid_coordinates(self.dims, self.domain)


@dataclass
class RelaxationReport:
    energy_trace: list
    iterations: int
    final_gradient_norm: float
    converged: bool
    # "grad_tol", "max_iter" or "stalled" (no energy decrease at any trial step)
    stop_reason: str = "grad_tol"

    def as_dict(self) -> dict:
        return {
            "energy_trace": [float(e) for e in self.energy_trace],
            "iterations": int(self.iterations),
            "final_gradient_norm": float(self.final_gradient_norm),
            "converged": bool(self.converged),
            "stop_reason": self.stop_reason,
        }


def grid_spacing(dims, domain: DomainSpec):
    nx, ny, nz = dims
    return 2.0 * domain.l1 / nx, 2.0 * domain.l2 / ny, 1.0 / (nz - 1)


def grid_coordinates(dims, domain: DomainSpec):
    nx, ny, nz = dims
    hx, hy, _ = grid_spacing(dims, domain)
    x = -domain.l1 + hx * np.arange(nx)
    y = -domain.l2 + hy * np.arange(ny)
    z = np.linspace(0.0, 1.0, nz)
    return x, y, z


def with_plates(values: np.ndarray, bc: BoundaryCondition) -> np.ndarray:
    """Copy of ``values`` with both plate layers set exactly to the anchoring."""
    values = np.array(values, dtype=float)
    values[:, :, 0] = bc.bottom
    values[:, :, -1] = bc.top
    return values


# -- stencils -----------------------------------------------------------------

class Stencils:
    """Difference and quadrature operators for one grid shape.

    The density is evaluated at the mid-levels ``z_{k+1/2}`` of every
    ``(x_i, y_j)`` column: ``n`` and its centered x/y differences are
    averaged over the two adjacent levels, ``d/dz`` is the one-cell
    difference. A plain centered z-stencil would leave odd and even levels
    decoupled and the relaxation drifts into a zigzag that undercuts the
    true minimum.
    """

    def __init__(self, dims, domain: DomainSpec):
        self.dims = tuple(int(d) for d in dims)
        self.hx, self.hy, self.hz = grid_spacing(self.dims, domain)
        nx, ny, nz = self.dims
        self.cell_volume = self.hx * self.hy * self.hz
        self.weights = np.full((nx, ny, nz - 1), self.cell_volume)
        # volume attached to each node, used to turn nodal derivatives into densities
        wz = np.full(nz, self.hz)
        wz[0] = wz[-1] = 0.5 * self.hz
        self.node_weights = self.hx * self.hy * np.broadcast_to(wz, self.dims)

    def ddx(self, u):
        return (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0)) / (2.0 * self.hx)

    def ddy(self, u):
        return (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1)) / (2.0 * self.hy)

    @staticmethod
    def mid(u):
        """Average onto the mid-levels."""
        return 0.5 * (u[:, :, 1:] + u[:, :, :-1])

    @staticmethod
    def mid_t(w):
        """Transpose of :meth:`mid`."""
        shape = list(w.shape)
        shape[2] += 1
        out = np.zeros(shape)
        out[:, :, 1:] += 0.5 * w
        out[:, :, :-1] += 0.5 * w
        return out

    def ddz(self, u):
        return (u[:, :, 1:] - u[:, :, :-1]) / self.hz

    def ddz_t(self, w):
        shape = list(w.shape)
        shape[2] += 1
        out = np.zeros(shape)
        out[:, :, 1:] += w / self.hz
        out[:, :, :-1] -= w / self.hz
        return out

    def gradient(self, values):
        """``G[..., i, j] = d n_i / d x_j`` at the mid-levels."""
        return np.stack([self.mid(self.ddx(values)), self.mid(self.ddy(values)), self.ddz(values)], axis=-1)

    def gradient_adjoint(self, dgrad):
        """Transpose of :meth:`gradient` applied to a mid-level ``(..., 3, 3)`` field."""
        # periodic centered differences are antisymmetric
        return (-self.ddx(self.mid_t(dgrad[..., 0])) - self.ddy(self.mid_t(dgrad[..., 1]))
                + self.ddz_t(dgrad[..., 2]))

    def laplacian(self, values):
        """Nodal 7-point Laplacian; plate layers are left at zero."""
        lap = (np.roll(values, -1, 0) - 2.0 * values + np.roll(values, 1, 0)) / self.hx**2
        lap = lap + (np.roll(values, -1, 1) - 2.0 * values + np.roll(values, 1, 1)) / self.hy**2
        dzz = np.zeros_like(values)
        dzz[:, :, 1:-1] = (values[:, :, 2:] - 2.0 * values[:, :, 1:-1] + values[:, :, :-2]) / self.hz**2
        return lap + dzz

    def nodal_gradient(self, values):
        """Centered nodal differences (one-sided second order on the plates)."""
        dz = np.empty_like(values)
        dz[:, :, 1:-1] = (values[:, :, 2:] - values[:, :, :-2]) / (2.0 * self.hz)
        dz[:, :, 0] = (-3.0 * values[:, :, 0] + 4.0 * values[:, :, 1] - values[:, :, 2]) / (2.0 * self.hz)
        dz[:, :, -1] = (3.0 * values[:, :, -1] - 4.0 * values[:, :, -2] + values[:, :, -3]) / (2.0 * self.hz)
        return np.stack([self.ddx(values), self.ddy(values), dz], axis=-1)

    def integrate(self, density):
        """Midpoint-rule integral of a mid-level density."""
        # fixed summation order keeps repeated runs bit-identical
        return float(np.sum(self.weights * density))


_STENCIL_CACHE: dict = {}


def stencils_for(dims, domain: DomainSpec) -> Stencils:
    key = (tuple(int(d) for d in dims), domain.l1, domain.l2)
    st = _STENCIL_CACHE.get(key)
    if st is None:
        st = _STENCIL_CACHE[key] = Stencils(dims, domain)
    return st


def _values_and_domain(grid, domain=None):
    if isinstance(grid, DirectorGrid):
        return grid.values, grid.domain
    if domain is None:
        raise ValueError("a DomainSpec is needed for raw arrays")
    return np.asarray(grid, dtype=float), domain


# -- energy -------------------------------------------------------------------

def discrete_energy(grid, K: ElasticConstants, t, domain: DomainSpec | None = None) -> float:
    """Quadrature of the Oseen-Frank density over the cell.

    ``grid`` may be a :class:`DirectorGrid` or a raw ``(nx, ny, nz, 3)``
    array together with ``domain``.
    """
    values, domain = _values_and_domain(grid, domain)
    st = stencils_for(values.shape[:3], domain)
    w, _, _ = density_partials(st.mid(values), st.gradient(values), K, t)
    return st.integrate(w)


def _full_gradient(values, st: Stencils, K, t):
    w, dn, dgrad = density_partials(st.mid(values), st.gradient(values), K, t)
    g = st.mid_t(st.weights[..., None] * dn) + st.gradient_adjoint(st.weights[..., None, None] * dgrad)
    g[:, :, 0] = 0.0
    g[:, :, -1] = 0.0
    return st.integrate(w), g


def _tangent(g, values):
    return g - np.sum(g * values, axis=-1, keepdims=True) * values


def discrete_gradient(grid, K: ElasticConstants, t, domain: DomainSpec | None = None) -> np.ndarray:
    """Derivative of :func:`discrete_energy` in the nodal values, tangent part only.

    Plate layers are held fixed and get zero entries.
    """
    values, domain = _values_and_domain(grid, domain)
    st = stencils_for(values.shape[:3], domain)
    _, g = _full_gradient(values, st, K, t)
    return _tangent(g, values)


@dataclass
class RelaxOptions:
    max_iter: int = 20000
    grad_tol: float = 1e-6
    step_init: float = 1e-2
    shrink: float = 0.5
    max_halvings: int = 40


def relax(grid: DirectorGrid, K: ElasticConstants, t, opts: RelaxOptions | None = None,
          **overrides) -> tuple[DirectorGrid, RelaxationReport]:
    """Projected gradient descent on the sphere.

    Each step moves along the negative tangent gradient, renormalizes every
    node and halves the step until the energy decreases. The gradient is
    taken per unit volume (nodal derivative divided by the quadrature
    weight) so step sizes and ``grad_tol`` do not depend on the mesh. Trial
    step lengths come from the Barzilai-Borwein formula, with ``step_init``
    for the first step. Stops when the largest nodal gradient norm is below
    ``grad_tol``, after ``max_iter`` steps, or when no trial step lowers the
    energy (the run has reached rounding level; ``stop_reason="stalled"``).
    """
    opts = replace(opts or RelaxOptions(), **overrides)
    t = as_chirality(t)
    st = stencils_for(grid.dims, grid.domain)
    inv_w = 1.0 / st.node_weights[..., None]
    inv_w[:, :, 0] = 0.0
    inv_w[:, :, -1] = 0.0

    x = np.array(grid.values)
    energy, g = _full_gradient(x, st, K, t)
    g = _tangent(g * inv_w, x)
    trace = [energy]
    step = opts.step_init
    x_prev = g_prev = None
    converged = False
    reason = "max_iter"
    gnorm = float(np.max(np.linalg.norm(g, axis=-1)))
    it = 0
    for it in range(1, opts.max_iter + 1):
        if gnorm < opts.grad_tol:
            converged = True
            reason = "grad_tol"
            it -= 1
            break
        if x_prev is not None:
            s = (x - x_prev).ravel()
            y = (g - g_prev).ravel()
            sy = float(np.dot(s, y))
            if sy > 0:
                step = float(np.dot(s, s)) / sy
            else:
                step = 2.0 * step
        for _ in range(opts.max_halvings + 1):
            trial = x - step * g
            trial /= np.linalg.norm(trial, axis=-1, keepdims=True)
            e_trial, g_trial = _full_gradient(trial, st, K, t)
            if e_trial < energy:
                break
            step *= opts.shrink
        else:
            # no decrease at any trial step: stuck at rounding level
            reason = "stalled"
            it -= 1
            break
        x_prev, g_prev = x, g
        x, energy = trial, e_trial
        g = _tangent(g_trial * inv_w, x)
        gnorm = float(np.max(np.linalg.norm(g, axis=-1)))
        trace.append(energy)
    else:
        converged = gnorm < opts.grad_tol
        if converged:
            reason = "grad_tol"
    out = DirectorGrid(with_plates(x, grid.bc), grid.domain, grid.bc)
    return out, RelaxationReport(trace, it, gnorm, converged, reason)


# -- construction ---------------------------------------------------------------

def embed_profile(profile: EulerProfile, dims, domain: DomainSpec | None = None,
                  bc: BoundaryCondition | str | None = None) -> DirectorGrid:
    """Sample ``n = (cos phi cos theta, sin phi cos theta, sin theta)`` on the grid.

    The boundary condition defaults to frustrated, or homeotropic when the
    profile starts at ``theta = pi/2``.
    """
    domain = domain or DomainSpec()
    if bc is None:
        bc = (BoundaryCondition.HOMEOTROPIC if math.isclose(profile.theta[0], math.pi / 2)
              else BoundaryCondition.FRUSTRATED)
    bc = BoundaryCondition.parse(bc)
    nx, ny, nz = dims
    _, _, z = grid_coordinates(dims, domain)
    theta, phi = profile_at(profile, z)
    column = director_from_angles(theta, phi)
    values = np.broadcast_to(column, (nx, ny, nz, 3))
    return DirectorGrid(with_plates(values, bc), domain, bc)


def constant_grid(vector, dims, domain: DomainSpec | None = None,
                  bc: BoundaryCondition | str = BoundaryCondition.HOMEOTROPIC) -> DirectorGrid:
    bc = BoundaryCondition.parse(bc)
    values = np.broadcast_to(np.asarray(vector, dtype=float), tuple(dims) + (3,))
    return DirectorGrid(with_plates(values, bc), domain or DomainSpec(), bc)


def _mode_coefficients(seed: int) -> np.ndarray:
    """Random vector coefficients, independent of the grid so refinements sample one field.

    Shape ``(kx, ky, kz, x-phase, y-phase, 3)``; scaled so the summed field
    has pointwise norm at most 1.
    """
    rng = np.random.default_rng(seed)
    shape = (MAX_MODE_XY + 1, MAX_MODE_XY + 1, MAX_MODE_Z, 2, 2, 3)
    coeffs = rng.standard_normal(shape)
    kx = np.arange(MAX_MODE_XY + 1)[:, None, None]
    ky = np.arange(MAX_MODE_XY + 1)[None, :, None]
    kz = np.arange(1, MAX_MODE_Z + 1)[None, None, :]
    decay = 1.0 / (1.0 + kx**2 + ky**2 + kz**2)
    coeffs *= decay[..., None, None, None]
    # sin(0 * x) vanishes identically
    coeffs[0, :, :, 1] = 0.0
    coeffs[:, 0, :, :, 1] = 0.0
    total = np.sum(np.linalg.norm(coeffs, axis=-1))
    return coeffs / total


def _mode_field(seed: int, dims, domain: DomainSpec) -> np.ndarray:
    coeffs = _mode_coefficients(seed)
    x, y, z = grid_coordinates(dims, domain)
    kx = np.arange(MAX_MODE_XY + 1)
    ax = 2.0 * math.pi * np.outer(kx, x + domain.l1) / (2.0 * domain.l1)
    ay = 2.0 * math.pi * np.outer(kx, y + domain.l2) / (2.0 * domain.l2)
    bx = np.stack([np.cos(ax), np.sin(ax)], axis=1)  # (k, phase, nx)
    by = np.stack([np.cos(ay), np.sin(ay)], axis=1)
    bz = np.sin(math.pi * np.outer(np.arange(1, MAX_MODE_Z + 1), z))  # (kz, nz)
    return np.einsum("abcpqd,apx,bqy,cz->xyzd", coeffs, bx, by, bz)


def random_perturbation(grid: DirectorGrid, amplitude: float, seed: int) -> DirectorGrid:
    """Add a smooth tangent field (periodic in x, y, zero on the plates) and renormalize."""
    if amplitude < 0:
        raise ValueError("amplitude must be nonnegative")
    if amplitude == 0:
        return DirectorGrid(np.array(grid.values), grid.domain, grid.bc)
    v = amplitude * _mode_field(seed, grid.dims, grid.domain)
    v = _tangent(v, grid.values)
    values = grid.values + v
    values /= np.linalg.norm(values, axis=-1, keepdims=True)
    return DirectorGrid(with_plates(values, grid.bc), grid.domain, grid.bc)


def base_path(bc: BoundaryCondition, z: np.ndarray) -> np.ndarray:
    """Great-circle interpolation between the two plate values."""
    if bc is BoundaryCondition.FRUSTRATED:
        return np.stack([np.cos(0.5 * math.pi * z), np.zeros_like(z), np.sin(0.5 * math.pi * z)], axis=-1)
    return np.broadcast_to(E3, z.shape + (3,)).copy()


def smooth_periodic_sample(seed: int, dims, domain: DomainSpec | None = None,
                           bc: BoundaryCondition | str = BoundaryCondition.FRUSTRATED,
                           amplitude: float = 0.5) -> DirectorGrid:
    """Smooth admissible field: plate-to-plate path plus seeded tangent modes.

    The same ``seed`` describes the same continuum field on every grid.
    ``amplitude=0`` gives the bare path.
    """
    domain = domain or DomainSpec()
    bc = BoundaryCondition.parse(bc)
    nx, ny, nz = dims
    _, _, z = grid_coordinates(dims, domain)
    base = np.broadcast_to(base_path(bc, z), (nx, ny, nz, 3))
    values = np.array(base)
    if amplitude > 0:
        v = _tangent(amplitude * _mode_field(seed, dims, domain), base)
        values = values + v
        values /= np.linalg.norm(values, axis=-1, keepdims=True)
    return DirectorGrid(with_plates(values, bc), domain, bc)


# -- diagnostics --------------------------------------------------------------

def el_residual(grid: DirectorGrid, t) -> float:
    """Largest interior norm of ``lap n - 2t curl n + (|grad n|^2 + 2t n.curl n) n``."""
    t = float(as_chirality(t))
    st = stencils_for(grid.dims, grid.domain)
    n = grid.values
    grad = st.nodal_gradient(n)
    c = curl(grad)
    mult = np.einsum("...ij,...ij->...", grad, grad) + 2.0 * t * np.einsum("...i,...i->...", n, c)
    r = st.laplacian(n) - 2.0 * t * c + mult[..., None] * n
    return float(np.max(np.linalg.norm(r[:, :, 1:-1], axis=-1)))


def saddle_splay_integral(grid, domain: DomainSpec | None = None) -> float:
    """Quadrature of ``tr(grad n^2) - (div n)^2``; unit length is not required."""
    values, domain = _values_and_domain(grid, domain)
    st = stencils_for(values.shape[:3], domain)
    return st.integrate(saddle_splay_density(st.gradient(values)))


def pointwise_lambda(grid: DirectorGrid, t) -> np.ndarray:
    """``|grad n|^2 + 2t n.curl n`` at the mid-levels, same stencils as the energy."""
    t = float(as_chirality(t))
    st = stencils_for(grid.dims, grid.domain)
    grad = st.gradient(grid.values)
    return (np.einsum("...ij,...ij->...", grad, grad)
            + 2.0 * t * np.einsum("...i,...i->...", st.mid(grid.values), curl(grad)))


__all__ = [
    "BoundaryCondition",
    "DirectorGrid",
    "RelaxOptions",
    "RelaxationReport",
    "Stencils",
    "constant_grid",
    "discrete_energy",
    "discrete_gradient",
    "el_residual",
    "embed_profile",
    "pointwise_lambda",
    "random_perturbation",
    "relax",
    "saddle_splay_integral",
    "smooth_periodic_sample",
    "stencils_for",
]
