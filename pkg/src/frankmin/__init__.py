"""Cholesteric Oseen-Frank minimizers on a periodic cell.

Submodules: :mod:`~frankmin.core` (constants and densities),
:mod:`~frankmin.profile1d` (one-dimensional minimizers),
:mod:`~frankmin.field3d` (3D grids, energy, relaxation),
:mod:`~frankmin.stability` (coercivity constants, splitting functional),
:mod:`~frankmin.verify` (property suites), :mod:`~frankmin.io` and
:mod:`~frankmin.cli`.
"""
from .core import (
    Chirality,
    DomainSpec,
    ElasticConstants,
    angle_inequality_constant,
    frank_density,
    normalize_chirality,
    one_constant_density,
)
from .field3d import (
    BoundaryCondition,
    DirectorGrid,
    RelaxationReport,
    discrete_energy,
    discrete_gradient,
    el_residual,
    embed_profile,
    random_perturbation,
    relax,
    saddle_splay_integral,
    smooth_periodic_sample,
)
from .profile1d import (
    ConvergenceError,
    EulerProfile,
    brute_force_1d,
    delta_t,
    eta,
    first_integral_residual,
    minimize_1d,
    phi_profile,
    restricted_minimum,
    solve_first_integral_constant,
    theta_profile,
)
from .stability import (
    gamma_frustrated,
    gamma_homeotropic,
    h_functional,
    lambda_field,
    optimal_cauchy_eps,
    splitting_residual,
)

__version__ = "0.1.0"
