"""Seeded property suites backing ``frankmin verify``.

Every suite returns a JSON-ready dict ``{"suite", "passed", "cases"}``
where each case carries its own ``pass`` flag and the numbers it was
judged on. Seeds and grids are fixed so reports are reproducible.
"""
from __future__ import annotations

import math

import numpy as np

from .core import (
    DomainSpec,
    ElasticConstants,
    angle_inequality_constant,
    director_from_angles,
    euler_angles,
)
from .field3d import (
    BoundaryCondition,
    constant_grid,
    discrete_energy,
    discrete_gradient,
    embed_profile,
    saddle_splay_integral,
    smooth_periodic_sample,
)
from .profile1d import first_integral_residual, minimize_1d, restricted_minimum
from .stability import splitting_residual

SUITES = (
    "saddle-splay",
    "splitting",
    "first-integral",
    "lemma-monotone",
    "gradient-check",
    "angle-inequality",
)

REFINEMENT_NZ = (17, 33, 65)
# below this |J| or splitting residuals are rounding noise, not discretization error
ROUNDING_FLOOR = 1e-12


def _report(name: str, cases: list, **extra) -> dict:
    out = {"suite": name, "passed": all(c["pass"] for c in cases), "cases": cases}
    out.update(extra)
    return out


def observed_order(errors, ratio: float = 2.0) -> list[float]:
    """``log(e_k / e_{k+1}) / log(ratio)`` for successive refinements."""
    e = np.abs(np.asarray(errors, dtype=float))
    return [float(math.log(e[i] / e[i + 1]) / math.log(ratio)) for i in range(len(e) - 1)]


def saddle_splay_suite(n_fields: int = 20, nxy: int = 8, seed0: int = 0) -> dict:
    """Saddle-splay integral of smooth admissible fields under z-refinement.

    Pass: Richardson limit within 1e-8 of zero, finest value below 1e-4
    and not above ten times the O(h^2) prediction from the two coarser
    grids (plus a rounding floor).
    """
    cases = []
    for seed in range(seed0, seed0 + n_fields):
        vals = [saddle_splay_integral(smooth_periodic_sample(seed, (nxy, nxy, nz)))
                for nz in REFINEMENT_NZ]
        extrap = (4.0 * vals[2] - vals[1]) / 3.0
        predicted = abs(vals[1]) / 4.0
        ok = (abs(extrap) <= 1e-8 and abs(vals[2]) < 1e-4
              and abs(vals[2]) <= 10.0 * predicted + ROUNDING_FLOOR)
        cases.append({"seed": seed, "nz": list(REFINEMENT_NZ), "J": vals,
                      "extrapolated": extrap, "pass": bool(ok)})
    return _report("saddle-splay", cases)


def splitting_study(bc, seed: int, t: float, nxy: int = 16, nstar_profile=None) -> dict:
    """Splitting residuals for one seeded field over :data:`REFINEMENT_NZ`."""
    bc = BoundaryCondition.parse(bc)
    res = []
    for nz in REFINEMENT_NZ:
        dims = (nxy, nxy, nz)
        if bc is BoundaryCondition.FRUSTRATED:
            nstar = embed_profile(nstar_profile, dims)
        else:
            nstar = constant_grid([0.0, 0.0, 1.0], dims)
        n = smooth_periodic_sample(seed, dims, bc=bc)
        res.append(splitting_residual(n, nstar, t))
    if max(res) <= ROUNDING_FLOOR:
        orders = None
    else:
        orders = observed_order(res)
    return {"bc": bc.value, "seed": seed, "t": t, "nz": list(REFINEMENT_NZ),
            "residuals": res, "orders": orders}


def splitting_suite(n_seeds: int = 5, t_frustrated: float = 0.5, t_homeotropic: float = 0.8) -> dict:
    """Splitting identity ``I(n) - I(n*) = H(n - n*)`` under z-refinement.

    Frustrated: the residual must decay at order in [1.8, 2.2]. Homeotropic:
    with ``n* = e3`` the discrete identity holds exactly (the e3.curl v term
    sums to zero over the periodic cell), so the residual must stay at
    rounding level on every grid; no order can be measured.
    """
    profile = minimize_1d(ElasticConstants.single(), t_frustrated, n_nodes=8001)
    cases = []
    for seed in range(n_seeds):
        c = splitting_study("frustrated", seed, t_frustrated, nstar_profile=profile)
        c["pass"] = c["orders"] is not None and all(1.8 <= o <= 2.2 for o in c["orders"])
        cases.append(c)
    for seed in range(n_seeds):
        c = splitting_study("homeotropic", seed, t_homeotropic)
        c["pass"] = max(c["residuals"]) <= ROUNDING_FLOOR
        c["exact"] = True
        cases.append(c)
    return _report("splitting", cases)


FIRST_INTEGRAL_CASES = (
    ((1.0, 1.0, 1.0, 0.0), 0.0),
    ((1.0, 1.0, 1.0, 0.0), 2.5),
    ((1.0, 1.0, 1.0, 0.0), 5.0),
    ((1.0, 1.0, 1.0, 0.0), 10.0),
    ((1.0, 1.0, 1.0, 0.0), 20.0),
    ((1.0, 2.0, 3.0, 0.0), 1.0),
)


def first_integral_suite(n_nodes: int = 1001, tol: float = 1e-6) -> dict:
    cases = []
    for k, t in FIRST_INTEGRAL_CASES:
        p = minimize_1d(ElasticConstants.from_sequence(k), t, n_nodes)
        r = first_integral_residual(p)
        cases.append({"k": list(k), "t": t, "n_nodes": n_nodes, "residual": r, "pass": r < tol})
    return _report("first-integral", cases, tolerance=tol)


LEMMA_ALPHAS = (0.25, 0.5, 1.0, 2.0, 4.0)


def lemma_monotone_suite(ts=(0.5, 1.0, 2.0), n_nodes: int = 1001) -> dict:
    """``restricted_minimum`` must strictly decrease in ``alpha``."""
    cases = []
    for k in ((1.0, 1.0, 1.0, 0.0), (1.0, 2.0, 3.0, 0.0)):
        K = ElasticConstants.from_sequence(k)
        for t in ts:
            vals = [restricted_minimum(a, K, t, n_nodes) for a in LEMMA_ALPHAS]
            ok = all(a > b for a, b in zip(vals, vals[1:]))
            cases.append({"k": list(k), "t": t, "alpha": list(LEMMA_ALPHAS),
                          "minimum": vals, "pass": bool(ok)})
    return _report("lemma-monotone", cases)


GRADIENT_EPS = (1e-3, 1e-4, 1e-5)


def gradient_check(seed: int, dims=(8, 7, 9), K: ElasticConstants | None = None,
                   scale: float = 4.0) -> dict:
    """Central-difference directional derivative against the analytic gradient.

    General elastic constants are used by default: the one-constant energy
    is quadratic in the nodal values, which makes the central difference
    exact and leaves no slope to measure. ``scale`` sizes the random
    direction so the O(eps^2) term still dominates rounding at eps = 1e-5.
    """
    rng = np.random.default_rng(seed)
    K = K or ElasticConstants(1.0, 2.0, 3.0, 0.5)
    t = float(rng.uniform(0.2, 2.0))
    domain = DomainSpec(float(rng.uniform(0.15, 0.4)), float(rng.uniform(0.15, 0.4)))
    grid = smooth_periodic_sample(seed, dims, domain, "frustrated", amplitude=0.5)
    g = discrete_gradient(grid, K, t)
    v = scale * rng.standard_normal(grid.values.shape)
    v[:, :, 0] = v[:, :, -1] = 0.0
    v -= np.sum(v * grid.values, axis=-1, keepdims=True) * grid.values
    exact = float(np.sum(g * v))
    errs = []
    for eps in GRADIENT_EPS:
        ep = discrete_energy(grid.values + eps * v, K, t, domain)
        em = discrete_energy(grid.values - eps * v, K, t, domain)
        errs.append(abs((ep - em) / (2.0 * eps) - exact))
    slopes = observed_order(errs, ratio=10.0)
    return {"seed": seed, "t": t, "directional_derivative": exact, "eps": list(GRADIENT_EPS),
            "errors": errs, "slopes": slopes}


def gradient_check_suite(n_grids: int = 5) -> dict:
    cases = []
    for seed in range(n_grids):
        c = gradient_check(seed)
        c["pass"] = all(1.9 <= s <= 2.1 for s in c["slopes"])
        cases.append(c)
    return _report("gradient-check", cases)


def angle_inequality_suite(n_pairs: int = 10_000, seed: int = 0) -> dict:
    """``|n1 - n2|^2 >= C |theta1 - theta2|^2`` on random unit-vector pairs."""
    C = angle_inequality_constant()
    rng = np.random.default_rng(seed)
    n1 = rng.standard_normal((n_pairs, 3))
    n2 = rng.standard_normal((n_pairs, 3))
    n1 /= np.linalg.norm(n1, axis=-1, keepdims=True)
    n2 /= np.linalg.norm(n2, axis=-1, keepdims=True)
    th1, _ = euler_angles(n1)
    th2, _ = euler_angles(n2)
    lhs = np.sum((n1 - n2) ** 2, axis=-1)
    rhs = C * (th1 - th2) ** 2
    slack = float(np.min(lhs - rhs))
    # the constant itself: the ratio is decreasing on [0, pi], so the infimum is 2/pi^2
    const_ok = abs(C - 2.0 / math.pi**2) < 1e-9
    # pairs sharing an azimuth are the tight ones
    th = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, (n_pairs, 2))
    phi = rng.uniform(-math.pi, math.pi, n_pairs)
    m1 = director_from_angles(th[:, 0], phi)
    m2 = director_from_angles(th[:, 1], phi)
    tight = float(np.min(np.sum((m1 - m2) ** 2, axis=-1) - C * (th[:, 0] - th[:, 1]) ** 2))
    cases = [
        {"case": "constant", "C": C, "expected": 2.0 / math.pi**2, "pass": bool(const_ok)},
        {"case": "random pairs", "pairs": n_pairs, "min_slack": slack, "pass": slack >= -1e-12},
        {"case": "shared azimuth", "pairs": n_pairs, "min_slack": tight, "pass": tight >= -1e-12},
    ]
    return _report("angle-inequality", cases)


_RUNNERS = {
    "saddle-splay": saddle_splay_suite,
    "splitting": splitting_suite,
    "first-integral": first_integral_suite,
    "lemma-monotone": lemma_monotone_suite,
    "gradient-check": gradient_check_suite,
    "angle-inequality": angle_inequality_suite,
}


def run_suite(name: str) -> dict:
    try:
        runner = _RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return runner()
