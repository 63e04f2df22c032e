"""``frankmin`` command-line interface.

Subcommands: ``solve1d``, ``embed``, ``relax``, ``scan`` and ``verify``.
Every output file carries (or sits next to) a metadata block with the full
parameter set, so a run can be replayed from it.

Exit codes: 0 success, 1 bad arguments, 2 solver failure, 3 a verification
suite failed. ``FRANKMIN_THREADS`` caps the BLAS/OpenMP thread pools.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import __version__
from . import io as fio
from .core import DomainSpec, ElasticConstants, normalize_chirality
from .field3d import (
    BoundaryCondition,
    constant_grid,
    discrete_energy,
    embed_profile,
    random_perturbation,
    relax,
)
from .profile1d import ConvergenceError, delta_t, minimize_1d
from .stability import threshold_frustrated, threshold_homeotropic, optimal_cauchy_eps, scan
from .verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3
FIG1_T = (2.5, 5.0, 10.0, 20.0)
DEFAULT_DIMS = (16, 16, 33)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad input; 2 is reserved for solver failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _constants(args) -> ElasticConstants:
    if args.k is None:
        return ElasticConstants.single()
    try:
        K = ElasticConstants.from_sequence(args.k.split(","))
    except ValueError as exc:
        raise UsageError(f"--k: {exc}") from None
    if args.one_constant and not K.one_constant:
        raise UsageError("--one-constant conflicts with unequal --k values")
    return K


def _dims(text: str):
    try:
        dims = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--dims expects nx,ny,nz, got {text!r}") from None
    if len(dims) != 3 or min(dims[:2]) < 2 or dims[2] < 3:
        raise UsageError("--dims needs nx, ny >= 2 and nz >= 3")
    return dims


def _metadata(args, **extra) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("func",)}
    meta = {"command": args.command, "parameters": params, "version": __version__}
    meta.update(extra)
    return meta


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _tag(x: float) -> str:
    return format(x, "g")


# -- subcommands ------------------------------------------------------------------

def cmd_solve1d(args) -> int:
    K = _constants(args)
    ts = FIG1_T if args.fig1 else (args.t,)
    out = _out_dir(args)
    for t_raw in ts:
        chi = normalize_chirality(t_raw)
        profile = minimize_1d(K, chi, args.nodes)
        extra = {"reflected": chi.reflected}
        if K.one_constant:
            extra["D"] = profile.first_integral_constant / K.k1
            extra["delta_t"] = delta_t(profile)
        stem = ("fig1_t" if args.fig1 else "profile_t") + _tag(chi.t)
        path, side = fio.write_profile_csv(profile, out / f"{stem}.csv", _metadata(args, **extra))
        print(f"t={_tag(chi.t)} C={profile.first_integral_constant:.12g} "
              f"energy_per_area={profile.energy_per_area:.12g} -> {path}")
    return EXIT_OK


def cmd_embed(args) -> int:
    K = _constants(args)
    dims = _dims(args.dims)
    domain = DomainSpec(args.l1, args.l2)
    chi = normalize_chirality(args.t)
    profile = minimize_1d(K, chi, args.nodes)
    grid = embed_profile(profile, dims, domain)
    out = _out_dir(args)
    path = fio.write_grid(grid, out / f"embed_t{_tag(chi.t)}.ofgrid")
    energy = discrete_energy(grid, K, chi)
    fio.write_json(path.with_suffix(".json"), _metadata(
        args, energy=energy, profile_energy=profile.energy_per_area * domain.area,
        reflected=chi.reflected))
    print(f"discrete energy {energy:.12g} (1D profile {profile.energy_per_area * domain.area:.12g}) -> {path}")
    return EXIT_OK


def start_grid(bc: BoundaryCondition, K, chi, dims, domain, nodes: int = 1001):
    """Unperturbed start and reference energy for :func:`cmd_relax`.

    Frustrated: the embedded 1D minimizer (reference = its discrete
    energy). Homeotropic: ``e3`` (reference = ``K2 t^2`` times the area).
    """
    if bc is BoundaryCondition.FRUSTRATED:
        profile = minimize_1d(K, chi, nodes)
        grid = embed_profile(profile, dims, domain)
        return grid, discrete_energy(grid, K, chi)
    grid = constant_grid([0.0, 0.0, 1.0], dims, domain, bc)
    return grid, K.k2 * float(chi) ** 2 * domain.area


def cmd_relax(args) -> int:
    K = _constants(args)
    dims = _dims(args.dims)
    domain = DomainSpec(args.l1, args.l2)
    bc = BoundaryCondition.parse(args.bc)
    chi = normalize_chirality(args.t)
    if args.perturb < 0:
        raise UsageError("--perturb must be nonnegative")
    base, reference = start_grid(bc, K, chi, dims, domain, args.nodes)
    start = random_perturbation(base, args.perturb, args.seed)
    grid, report = relax(start, K, chi, max_iter=args.max_iter, grad_tol=args.grad_tol,
                         step_init=args.step_init)
    out = _out_dir(args)
    stem = f"relax_{bc.value}_t{_tag(chi.t)}_seed{args.seed}"
    path = fio.write_grid(grid, out / f"{stem}.ofgrid")
    final = report.energy_trace[-1]
    rel = final / reference - 1.0
    fio.write_json(out / f"{stem}.json", _metadata(
        args, report=report.as_dict(), reference_energy=reference,
        final_energy=final, relative_to_reference=rel, reflected=chi.reflected))
    print(f"{report.stop_reason} after {report.iterations} iterations, "
          f"energy {final:.12g} (reference {reference:.12g}, relative {rel:+.3e}) -> {path}")
    return EXIT_OK


def cmd_scan(args) -> int:
    try:
        rows = scan(args.t_min, args.t_max, args.steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = _out_dir(args)
    path = fio.write_scan_csv(rows, out / "scan.csv")
    roots = {"threshold_frustrated": threshold_frustrated(),
             "threshold_homeotropic": threshold_homeotropic(),
             "cauchy_eps_optimal_per_t": optimal_cauchy_eps(1.0)}
    fio.write_json(out / "scan.json", _metadata(args, **roots))
    print(f"frustrated threshold  {roots['threshold_frustrated']:.4f}")
    print(f"homeotropic threshold {roots['threshold_homeotropic']:.4f}")
    if len(rows) == 1:
        t, gf, gh = rows[0]
        print(f"t={t:g}: gamma_frustrated={gf:.4f} gamma_homeotropic={gh:.4f}")
    print(f"{len(rows)} rows -> {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    out = _out_dir(args)
    ok = True
    for name in names:
        report = run_suite(name)
        report["metadata"] = _metadata(args)
        path = fio.write_json(out / f"verify_{name}.json", report)
        n_pass = sum(c["pass"] for c in report["cases"])
        print(f"{name}: {n_pass}/{len(report['cases'])} pass -> {path}")
        ok &= report["passed"]
    return EXIT_OK if ok else EXIT_VERIFY


# -- parser -----------------------------------------------------------------------

def _add_constants(p):
    p.add_argument("--one-constant", action="store_true",
                   help="K1 = K2 = K3 = 1, K4 = 0 (the default without --k)")
    p.add_argument("--k", metavar="K1,K2,K3[,K4]", help="elastic constants")


def _add_cell(p):
    p.add_argument("--dims", default=",".join(map(str, DEFAULT_DIMS)), help="nx,ny,nz (default %(default)s)")
    p.add_argument("--l1", type=float, default=0.25, help="half-width in x")
    p.add_argument("--l2", type=float, default=0.25, help="half-width in y")
    p.add_argument("--nodes", type=int, default=1001, help="1D profile nodes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frankmin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"frankmin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve1d", help="one-dimensional minimizer profile")
    p.add_argument("--t", type=float, default=0.0, help="chirality (sign is folded into a reflection)")
    _add_constants(p)
    p.add_argument("--nodes", type=int, default=1001)
    p.add_argument("--fig1", action="store_true", help="profiles for t = 2.5, 5, 10, 20")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_solve1d)

    p = sub.add_parser("embed", help="write the 1D minimizer as a 3D grid")
    p.add_argument("--t", type=float, default=0.0)
    _add_constants(p)
    _add_cell(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("relax", help="projected gradient descent from a perturbed start")
    p.add_argument("--bc", choices=[b.value for b in BoundaryCondition], default="frustrated")
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--perturb", type=float, default=0.3, help="perturbation amplitude")
    _add_constants(p)
    _add_cell(p)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--grad-tol", type=float, default=1e-6)
    p.add_argument("--step-init", type=float, default=1e-2)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("scan", help="coercivity constants over a t range")
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=1.5)
    p.add_argument("--steps", type=int, default=150)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], required=True)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_verify)
    return parser


def _thread_cap():
    raw = os.environ.get("FRANKMIN_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRANKMIN_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError("FRANKMIN_THREADS must be positive")
    return n


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with threadpool_limits(limits=_thread_cap()):
            return args.func(args)
    except UsageError as exc:
        print(f"frankmin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"frankmin: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        # invalid parameter values rejected by the library (e.g. negative half-width)
        print(f"frankmin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
