"""Coercivity constants and the chirality thresholds they imply.

The lower bound gamma(t) on the second variation stays positive up to
t ~ 0.767 (frustrated plates) and t ~ 1.062 (homeotropic plates). Past
t = pi the homeotropic state is no longer even a local minimizer.

    python demos/stability.py
"""
import math

from frankmin.stability import (
    gamma_bound,
    gamma_frustrated,
    gamma_homeotropic,
    optimal_cauchy_eps,
    threshold_frustrated,
    threshold_homeotropic,
)

print(f"{'t':>5} {'frustrated':>11} {'homeotropic':>12}")
for i in range(13):
    t = 0.1 * i
    print(f"{t:5.1f} {gamma_frustrated(t):11.4f} {gamma_homeotropic(t):12.4f}")

print(f"\nfrustrated threshold   {threshold_frustrated():.5f}")
print(f"homeotropic threshold  {threshold_homeotropic():.5f}")

# the Cauchy weight eps = s t is a free choice; s = 4 is close to optimal
s_opt = optimal_cauchy_eps(1.0)
print(f"optimal slope {s_opt:.5f}: threshold {threshold_frustrated(s_opt):.5f} "
      f"(slope 4 gives {threshold_frustrated(4.0):.5f})")
print(f"gamma at t = 0.5 with the optimal slope: {gamma_bound(0.5, s_opt):.4f}")
print(f"pi^2/4 = {math.pi**2 / 4:.4f} is the t = 0 multiplier")
