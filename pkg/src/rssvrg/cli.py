"""Command-line entry point.

Four subcommands map onto the bench operations: `run` (one solver, one
seed), `compare` (solver set over shared seeds), `study` (sampling-size or
dimension sweep), `bounds` (bound calculators). A JSON config file can
mirror any subcommand's flags; explicit flags override the file, the file
overrides defaults, and unknown keys are an error rather than silence.

Exit codes: 0 success, 2 configuration problems, 1 runtime failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from . import bench, ranking
from .errors import ConfigurationError, SolverDivergedError
from .solvers import SOLVER_NAMES

_DIST_CHOICES = ("l2ball", "gaussian", "linfball")
_AXIS_ALIASES = {"m": "sampling_m", "d": "dimension_d",
                 "sampling_m": "sampling_m", "dimension_d": "dimension_d"}


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-pairs", type=int, default=1000)
    p.add_argument("--dim", type=int, default=10)
    p.add_argument("--reg", choices=ranking.REG_SETTINGS, default="ridge")
    p.add_argument("--dist", choices=_DIST_CHOICES, default="gaussian")
    p.add_argument("--m-samples", type=int, default=5)
    p.add_argument("--inner-m", type=int, default=2,
                   help="base inner-loop count M")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--a0", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=0.125)
    p.add_argument("--c-step", type=float, default=25.0)
    p.add_argument("--budget-cap", type=int, default=None,
                   help="optional cap on the doubling inner count M_s")
    p.add_argument("--seed", type=int, default=0,
                   help="instance seed (and the run seed for `run`)")
    p.add_argument("--data-in", default=None,
                   help="load instance difference vectors from CSV")
    p.add_argument("--data-out", default=None,
                   help="export the instance difference vectors to CSV")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--config", default=None,
                   help="JSON file mirroring this subcommand's flags")
    p.add_argument("--timings", action="store_true",
                   help="write real wall_ms into traces.csv (breaks "
                        "byte-identical reruns)")
    p.add_argument("--qp-reference", action="store_true",
                   help="add a convex-QP candidate to the reference "
                        "optimum (needs cvxpy)")


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(
        prog="rssvrg",
        description="Randomized-smoothing variance-reduced solver benchmark")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    p_run = sub.add_parser("run", help="single solver, single seed")
    _add_problem_flags(p_run)
    p_run.add_argument("--solver", choices=SOLVER_NAMES, default="rs_svrg")
    commands["run"] = p_run

    p_cmp = sub.add_parser("compare", help="solver set over shared seeds")
    _add_problem_flags(p_cmp)
    p_cmp.add_argument("--solvers", default=",".join(SOLVER_NAMES),
                       help="comma-separated solver names")
    p_cmp.add_argument("--seeds", type=int, default=10,
                       help="number of run seeds (0..n-1)")
    p_cmp.add_argument("--hp-check", action="store_true",
                       help="also run the monitored high-probability "
                            "coverage check (slow)")
    commands["compare"] = p_cmp

    p_study = sub.add_parser("study", help="sampling-size or dimension sweep")
    _add_problem_flags(p_study)
    p_study.add_argument("--axis", required=True,
                         choices=sorted(set(_AXIS_ALIASES)))
    p_study.add_argument("--grid", default=None,
                         help="comma-separated grid values")
    p_study.add_argument("--seeds", type=int, default=5)
    commands["study"] = p_study

    p_bounds = sub.add_parser("bounds", help="bound calculators")
    p_bounds.add_argument("--gap0", type=float, required=True)
    p_bounds.add_argument("--dist-sq0", type=float, required=True)
    p_bounds.add_argument("--l0", type=float, required=True)
    p_bounds.add_argument("--l1", type=float, required=True)
    p_bounds.add_argument("--a0", type=float, default=1.0)
    p_bounds.add_argument("--inner-m", type=int, default=2)
    p_bounds.add_argument("--b", type=float, required=True)
    p_bounds.add_argument("--m-samples", type=int, default=5)
    p_bounds.add_argument("--sigma", type=float, default=0.0)
    p_bounds.add_argument("--delta1", type=float, default=0.1)
    p_bounds.add_argument("--delta2", type=float, default=0.1)
    p_bounds.add_argument("--ms", type=int, default=None,
                          help="M_s for the high-probability term "
                               "(default: --inner-m)")
    p_bounds.add_argument("--epsilon", type=float, default=None,
                          help="also print the stage threshold for this "
                               "target accuracy")
    p_bounds.add_argument("--config", default=None)
    commands["bounds"] = p_bounds

    return parser, commands


def _apply_config_file(argv, args, commands):
    """Merge a JSON config under the explicit flags, rejecting unknown keys."""
    path = getattr(args, "config", None)
    if not path:
        return args
    try:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}")
    if not isinstance(loaded, dict):
        raise ConfigurationError("config file must hold a JSON object")
    allowed = {a.dest for a in commands[args.command]._actions} - {"help", "config"}
    unknown = sorted(set(loaded) - allowed)
    if unknown:
        raise ConfigurationError(
            f"unknown config keys: {', '.join(unknown)}")
    # defaults must land on the subcommand parser: the subparser re-applies
    # its own defaults over anything set on the top-level namespace
    parser, commands = build_parser()
    commands[args.command].set_defaults(**loaded)
    return parser.parse_args(argv)


def _effective_config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("command", "config")}


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _spec_from_args(args) -> bench.ExperimentSpec:
    return bench.ExperimentSpec(
        n_pairs=args.n_pairs, dim=args.dim, reg=args.reg, dist_name=args.dist,
        a0=args.a0, phi=args.phi, inner_m=args.inner_m,
        m_samples=args.m_samples, epochs=args.epochs, c_step=args.c_step,
        m_cap=args.budget_cap)


def _load_problem(args, spec):
    if args.data_in:
        inst = ranking.import_csv(args.data_in, reg_setting=args.reg)
        spec = replace(spec, n_pairs=inst.n_pairs, dim=inst.dim)
    else:
        inst = ranking.generate_instance(spec.n_pairs, spec.dim, args.seed,
                                         reg_setting=spec.reg,
                                         feature_high=spec.feature_high)
    if args.data_out:
        ranking.export_csv(inst, args.data_out)
    return ranking.to_problem(inst), spec


def _reference_budget(args) -> bench.ReferenceBudget:
    return bench.ReferenceBudget(use_qp=args.qp_reference)


def _cmd_run(args) -> int:
    spec = _spec_from_args(args)
    problem, spec = _load_problem(args, spec)
    cfg = bench.solver_config(spec, args.solver, args.seed, problem)
    result = bench.run_comparison(problem, [args.solver], [args.seed], cfg,
                                  reference_budget=_reference_budget(args))
    os.makedirs(args.out_dir, exist_ok=True)
    bench.write_traces(os.path.join(args.out_dir, "traces.csv"),
                       result.rows(timings=args.timings))
    _write_json(os.path.join(args.out_dir, "config.json"),
                _effective_config(args))
    return 0


def _cmd_compare(args) -> int:
    solver_list = [s.strip() for s in args.solvers.split(",") if s.strip()]
    if not solver_list:
        raise ConfigurationError("no solvers given")
    for s in solver_list:
        if s not in SOLVER_NAMES:
            raise ConfigurationError(f"unknown solver {s!r}")
    if args.seeds < 1:
        raise ConfigurationError("--seeds must be >= 1")
    spec = _spec_from_args(args)
    problem, spec = _load_problem(args, spec)
    cfg = bench.solver_config(spec, "rs_svrg", 0, problem)
    result = bench.run_comparison(problem, solver_list, list(range(args.seeds)),
                                  cfg, reference_budget=_reference_budget(args))
    os.makedirs(args.out_dir, exist_ok=True)
    bench.write_traces(os.path.join(args.out_dir, "traces.csv"),
                       result.rows(timings=args.timings))
    _write_json(os.path.join(args.out_dir, "config.json"),
                _effective_config(args))
    if args.hp_check:
        cov = bench.dprime_coverage(problem, cfg,
                                    reference_budget=_reference_budget(args))
        print(f"hp-check: fraction {cov.fraction:.3f} vs target "
              f"{cov.target_probability:.3f} (D'={cov.d_prime:.6g}, "
              f"threshold={cov.threshold:.6g})")
    return 0


def _cmd_study(args) -> int:
    axis = _AXIS_ALIASES[args.axis]
    if args.grid:
        grid = [int(v) for v in args.grid.split(",") if v.strip()]
    else:
        grid = list(bench.DEFAULT_M_GRID if axis == "sampling_m"
                    else bench.DEFAULT_D_GRID)
    spec = _spec_from_args(args)
    result = bench.run_study(axis, grid, spec, list(range(args.seeds)),
                             instance_seed=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    payload = result.to_json_dict()
    payload["config"]["cli"] = _effective_config(args)
    _write_json(os.path.join(args.out_dir, "study.json"), payload)
    _write_json(os.path.join(args.out_dir, "config.json"),
                _effective_config(args))
    return 0


def _cmd_bounds(args) -> int:
    inputs = bench.BoundInputs(
        gap0=args.gap0, dist_sq0=args.dist_sq0, l0=args.l0, l1=args.l1,
        a0=args.a0, M=args.inner_m, B=args.b, m=args.m_samples,
        sigma=args.sigma, delta1=args.delta1, delta2=args.delta2)
    d_val = bench.compute_bound_D(inputs)
    print(f"D = {d_val:.17g}")
    current = d_val
    if args.sigma > 0:
        m_s = args.ms if args.ms is not None else args.inner_m
        current = bench.compute_bound_Dprime(inputs, m_s)
        print(f"D_prime = {current:.17g}")
    if args.epsilon is not None:
        thr = bench.stage_threshold(current, args.delta1, args.epsilon)
        print(f"stages >= {thr:.17g}")
    return 0


_COMMANDS = {"run": _cmd_run, "compare": _cmd_compare,
             "study": _cmd_study, "bounds": _cmd_bounds}


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser, commands = build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config_file(argv, args, commands)
        return _COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse errors and --help
        code = exc.code
        return code if isinstance(code, int) else 2
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverDivergedError, RuntimeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
