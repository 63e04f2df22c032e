"""Relaxing perturbed directors back down to the minimizer.

A frustrated cell at t = 0.5 returns to the embedded 1D minimizer. A
homeotropic cell at t = 0.9 returns to the uniform state, but at t = 3.5
it finds a twisted state of lower energy.

    python demos/relax.py
"""
from frankmin import ElasticConstants
from frankmin.cli import start_grid
from frankmin.core import DomainSpec, normalize_chirality
from frankmin.field3d import BoundaryCondition, random_perturbation, relax

K = ElasticConstants.single()
dims, domain = (12, 12, 25), DomainSpec()
for bc, t in (("frustrated", 0.5), ("homeotropic", 0.9), ("homeotropic", 3.5)):
    chi = normalize_chirality(t)
    base, reference = start_grid(BoundaryCondition.parse(bc), K, chi, dims, domain)
    start = random_perturbation(base, 0.3, seed=1)
    grid, rep = relax(start, K, chi)
    final = rep.energy_trace[-1]
    print(f"{bc:>11} t={t:<4} start {rep.energy_trace[0]:.6f} -> {final:.6f} "
          f"(reference {reference:.6f}, relative {final / reference - 1:+.2e}, "
          f"{rep.iterations} iterations, {rep.stop_reason})")
