"""Command-line front end.

Subcommands:
  solve           run a configured solve, write CSV/JSON artifacts
  check-jacobian  compare the shooting derivative against finite differences
  bounds          evaluate the convergence conditions and rate estimates

Exit codes: 0 success (solve converged / check passed), 2 solver or check
failure (artifacts are still written), 1 configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import config as config_mod
from .dynamics import finite_diff_jacobians, rollout
from .errors import ConfigError, DivergenceError, DomainError, InputContractError
from .newton import CONVERGED, refine_support, solve
from .shooting import residual_and_jacobian, unstack_controls


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for j, values in rows:
            fh.write(",".join([str(j)] + [_fmt(v) for v in values]) + "\n")


def _write_json(path: Path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_artifacts(out_dir: Path, problem, result) -> dict:
    """Write control.csv, trajectory.csv, iterations.json and summary.json."""
    out_dir.mkdir(parents=True, exist_ok=True)
    q, m = problem.model.q_dim, problem.model.m

    controls = unstack_controls(result.u_final, q)
    _write_csv(out_dir / "control.csv",
               ["j"] + [f"u_{i}" for i in range(q)],
               ((j, controls[j]) for j in range(problem.N)))

    traj = rollout(problem.model, problem.x0, controls, problem.N)
    _write_csv(out_dir / "trajectory.csv",
               ["j"] + [f"x_{i}" for i in range(m)],
               ((j, traj[j]) for j in range(problem.N + 1)))

    _write_json(out_dir / "iterations.json", [
        {"k": rec.k, "p_k": rec.p_k, "gamma": rec.gamma,
         "step_l1_norm": rec.step_l1_norm,
         "direction_support": list(rec.direction_support),
         "nnz_u": rec.nnz_u, "beta_k": rec.beta_k,
         "backtracks": rec.backtracks}
        for rec in result.history])

    summary = {"status": result.status, "residual_inf": result.residual_inf,
               "u_l1_norm": result.u_l1_norm, "u_nnz": result.u_nnz,
               "iterations": result.iterations}
    _write_json(out_dir / "summary.json", summary)
    return summary


def cmd_solve(args) -> int:
    try:
        path = config_mod.resolve_config_path(args.config)
        cfg = config_mod.apply_overrides(config_mod.load_config(path), args.set or [])
        problem = config_mod.build_problem(cfg)
        solver_config = config_mod.build_solver_config(cfg)
        refine = config_mod.build_refine_settings(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(args.output) if args.output else Path("out") / path.stem
    t0 = time.perf_counter()
    try:
        if refine.enabled:
            result = refine_support(problem, solver_config,
                                    probe_steps=refine.probe_steps,
                                    refine_eps=refine.refine_eps)
        else:
            result = solve(problem, solver_config)
    except DivergenceError as exc:
        print(f"solve diverged: {exc}", file=sys.stderr)
        return 2
    wall = time.perf_counter() - t0

    write_artifacts(out_dir, problem, result)
    # wall time goes to stderr only: summary.json stays byte-reproducible
    print(f"# wall_time_s {wall:.6f}", file=sys.stderr)
    print(f"{result.status} {_fmt(result.residual_inf)} {_fmt(result.u_l1_norm)} "
          f"{result.u_nnz} {result.iterations}")
    return 0 if result.status == CONVERGED else 2


def check_jacobian(problem, fd_step: float, samples: int, seed: int = 0) -> float:
    """Max relative error of the assembled Jacobian over random controls."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = 0.1 * rng.standard_normal(problem.n)
        r0, J = residual_and_jacobian(problem, u)
        J_fd = np.empty_like(J)
        for col in range(problem.n):
            e = np.zeros(problem.n)
            e[col] = fd_step
            r_plus, _ = residual_and_jacobian(problem, u + e)
            r_minus, _ = residual_and_jacobian(problem, u - e)
            J_fd[:, col] = (r_plus - r_minus) / (2.0 * fd_step)
        err = np.max(np.abs(J_fd - J)) / max(1.0, np.max(np.abs(J)))
        worst = max(worst, float(err))
    return worst


def cmd_check_jacobian(args) -> int:
    if args.fd_step <= 0:
        print("fd-step must be positive", file=sys.stderr)
        return 1
    try:
        path = config_mod.resolve_config_path(args.config)
        cfg = config_mod.load_config(path)
        problem = config_mod.build_problem(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        worst = check_jacobian(problem, args.fd_step, args.samples)
    except DivergenceError as exc:
        print(f"rollout diverged while sampling: {exc}", file=sys.stderr)
        return 2
    print(f"max relative error {worst:.6e} over {args.samples} samples")
    return 0 if worst <= 1e-5 else 2


def cmd_bounds(args) -> int:
    try:
        constants = bounds_mod.ProblemConstants(mu0=args.mu0, mu=args.mu,
                                                L_const=args.L, rho=args.rho,
                                                s=args.s)
        if args.eps <= 0:
            raise InputContractError("eps must be positive")
    except InputContractError as exc:
        print(f"invalid constants: {exc}", file=sys.stderr)
        return 1

    for name, report in (("kantorovich", bounds_mod.kantorovich_check(constants)),
                         ("mysovskikh", bounds_mod.mysovskikh_check(constants))):
        line = (f"{name}: holds={report.condition_holds} h={_fmt(report.h_ratio)} "
                f"radius_bound={_fmt(report.radius_bound)}")
        if report.u_star_distance_bound is not None:
            line += f" distance_bound={_fmt(report.u_star_distance_bound)}"
        if report.series_diverged:
            line += " (series diverged)"
        print(line)

    k_max = bounds_mod.k_max_bound(args.mu, args.L, args.s)
    print(f"k_max {k_max}")
    try:
        print(f"K_eps {bounds_mod.k_eps_bound(args.mu, args.L, args.s, args.eps)}")
    except (DomainError, InputContractError) as exc:
        print(f"K_eps undefined: {exc}")
    try:
        print(f"distance_estimate_0 {_fmt(bounds_mod.distance_estimate(0, args.mu, args.L, args.s))}")
    except (DomainError, InputContractError) as exc:
        print(f"distance_estimate_0 undefined: {exc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsenewton",
        description="Sparse-control boundary value solver via Newton methods "
                    "for under-determined systems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a configured solve")
    p_solve.add_argument("--config", required=True,
                         help="config file path or bundled name (e.g. pendulum)")
    p_solve.add_argument("--output", default=None,
                         help="artifact directory (default out/<config-stem>/)")
    p_solve.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a config entry, e.g. solver.eps=1e-6")
    p_solve.set_defaults(func=cmd_solve)

    p_check = sub.add_parser("check-jacobian",
                             help="compare the shooting Jacobian to finite differences")
    p_check.add_argument("--config", required=True)
    p_check.add_argument("--fd-step", type=float, default=1e-6, dest="fd_step")
    p_check.add_argument("--samples", type=int, default=5)
    p_check.set_defaults(func=cmd_check_jacobian)

    p_bounds = sub.add_parser("bounds", help="evaluate convergence conditions")
    p_bounds.add_argument("--mu", type=float, required=True)
    p_bounds.add_argument("--mu0", type=float, required=True)
    p_bounds.add_argument("--L", type=float, required=True)
    p_bounds.add_argument("--s", type=float, required=True)
    p_bounds.add_argument("--rho", type=float, required=True)
    p_bounds.add_argument("--eps", type=float, default=1e-9)
    p_bounds.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
