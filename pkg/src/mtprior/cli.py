"""Batch command-line front end.

Five subcommands cover the pipeline: ``gen`` (synthetic data), ``prior``
(build D), ``solve`` (one algorithm), ``compare`` (all five algorithms from
one start), ``eval`` (regression/classification metrics).  Every run writes
its fully resolved configuration into ``report.json`` in the output directory,
and identical flags plus seeds reproduce output files byte for byte.

A JSON file passed via ``--config`` supplies defaults for any flag (keys are
the flag names with dashes replaced by underscores); explicit flags win.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import data_io, metrics as metrics_mod, prior as prior_mod
from .errors import DegenerateLabelsError
from .model import (
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    validate_instance,
)
from .objective import compute_constants
from .solvers import ALGORITHMS, SolverConfig, run_comparison, solve


def _add_config_flag(sub):
    sub.add_argument("--config", help="JSON file with default values for any flag")


def _add_reg_flags(sub):
    sub.add_argument("--lambda", dest="lam", type=float, help="group-lasso weight (default 1)")
    sub.add_argument("--theta", type=float, help="prior-penalty weight (default 1)")
    sub.add_argument("--epsilon", dest="eps", type=float, help="smoothness weight (default 1)")


def _add_solver_flags(sub):
    sub.add_argument("--tolerance", type=float, help="objective-change stopping tolerance (default 1e-3)")
    sub.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap (default 10000)")
    sub.add_argument("--constants", choices=("safe", "paper"),
                     help="curvature-constant source (default safe)")
    sub.add_argument("--beta-shrink", dest="beta_shrink", type=float,
                     help="reverse-search shrink factor (default 0.5)")
    sub.add_argument("--beta-grow", dest="beta_grow", type=float,
                     help="forward-search growth factor (default 2.0)")
    sub.add_argument("--search-cap", dest="search_cap", type=int,
                     help="step-search test cap per iteration (default 60)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mtprior",
        description="Multi-task solvers with pairwise feature-relation priors",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("solve", help="solve one instance with one algorithm")
    _add_config_flag(p)
    p.add_argument("--tasks", nargs="+", help="task CSV files, order is significant")
    p.add_argument("--prior", help="optional prior matrix CSV")
    p.add_argument("--algo", choices=ALGORITHMS, help="algorithm (default ista-modified)")
    _add_reg_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser("compare", help="run all five algorithms from one start")
    _add_config_flag(p)
    p.add_argument("--tasks", nargs="+", help="task CSV files")
    p.add_argument("--prior", help="optional prior matrix CSV")
    p.add_argument("--synthetic", help="generate input, e.g. d=50,m=10,n=100,k=10,cond=100,seed=7")
    _add_reg_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_compare)

    p = commands.add_parser("gen", help="write synthetic task CSVs with known ground truth")
    _add_config_flag(p)
    p.add_argument("--d", type=int, help="features per task (default 20)")
    p.add_argument("--m", type=int, help="number of tasks (default 5)")
    p.add_argument("--n", type=int, help="samples per task (default 100)")
    p.add_argument("--k", type=int, help="active coefficient rows (default 5)")
    p.add_argument("--drift", type=float, help="column-to-column drift scale (default 0.1)")
    p.add_argument("--noise", type=float, help="response noise std (default 0.1)")
    p.add_argument("--cond", type=float, help="target Gram condition number (default 1)")
    p.add_argument("--seed", type=int, help="generator seed (default 0)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_gen)

    p = commands.add_parser("prior", help="build a prior matrix from task files")
    _add_config_flag(p)
    p.add_argument("--tasks", nargs="+", help="task CSV files")
    p.add_argument("--mode", choices=("natural", "artificial"), help="construction protocol")
    p.add_argument("--threshold", type=float, help="natural: |correlation| cutoff (default 0.9)")
    p.add_argument("--max-constraints", dest="max_constraints", type=int,
                   help="natural: keep at most this many rows (default d)")
    p.add_argument("--include-negative", dest="include_negative", action="store_const", const=True,
                   help="natural: also emit rows for strong negative correlation")
    p.add_argument("--fraction", type=float, help="artificial: share of features to copy (default 0.05)")
    p.add_argument("--seed", type=int, help="artificial: duplicate-selection seed (default 0)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_prior)

    p = commands.add_parser("eval", help="score predictions or a model on test tasks")
    _add_config_flag(p)
    p.add_argument("--kind", choices=("regression", "classification"), help="metric family")
    p.add_argument("--tasks", nargs="+", help="test task CSV files (responses are truth)")
    p.add_argument("--model", help="coefficients CSV; predictions are X @ p_i")
    p.add_argument("--pred", nargs="+", help="per-task prediction CSVs (one column each)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_eval)

    return parser


def _resolved(args, defaults, required=()):
    """Merge CLI values over --config file values over built-in defaults."""
    from_file = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as handle:
            from_file = json.load(handle)
        unknown = set(from_file) - set(defaults)
        if unknown:
            raise ValueError(f"config file {args.config}: unknown keys {sorted(unknown)}")
    resolved = {}
    for key, fallback in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = from_file.get(key, fallback)
        resolved[key] = value
    for key in required:
        if resolved[key] is None:
            raise ValueError(f"--{key.replace('_', '-')} is required (flag or config file)")
    return resolved


_REG_DEFAULTS = {"lam": 1.0, "theta": 1.0, "eps": 1.0}
_SOLVER_DEFAULTS = {
    "tolerance": 1e-3,
    "max_iter": 10000,
    "constants": "safe",
    "beta_shrink": 0.5,
    "beta_grow": 2.0,
    "search_cap": 60,
}


def _load_instance(cfg):
    tasks = data_io.load_tasks_csv(cfg["tasks"])
    if cfg.get("prior"):
        prior = data_io.load_prior_csv(cfg["prior"], n_features=tasks[0].n_features)
    else:
        prior = PriorMatrix.empty(tasks[0].n_features)
    params = RegularizationParams(lam=cfg["lam"], theta=cfg["theta"], eps=cfg["eps"])
    return validate_instance(ProblemInstance(tasks=tuple(tasks), prior=prior, params=params))


def _solver_config(cfg, algorithm, constants=None):
    return SolverConfig(
        algorithm=algorithm,
        max_iterations=cfg["max_iter"],
        objective_tolerance=cfg["tolerance"],
        beta_shrink=cfg["beta_shrink"],
        beta_grow=cfg["beta_grow"],
        constants_source=cfg["constants"],
        search_cap=cfg["search_cap"],
        constants=constants,
    )


def _summary(result):
    return {
        "algorithm": result.algorithm,
        "iterations": result.iterations,
        "termination": result.termination,
        "final_objective": result.objective_trace[-1],
        "best_objective": result.best_objective,
        "min_stepsize_ratio": result.min_stepsize_ratio,
        "max_stepsize_ratio": result.max_stepsize_ratio,
    }


def cmd_solve(args):
    cfg = _resolved(
        args,
        {"tasks": None, "prior": None, "algo": "ista-modified", "out": None,
         **_REG_DEFAULTS, **_SOLVER_DEFAULTS},
        required=("tasks", "out"),
    )
    instance = _load_instance(cfg)
    constants = compute_constants(instance)
    result = solve(instance, _solver_config(cfg, cfg["algo"], constants))
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    data_io.write_trace_csv([result], os.path.join(out, "trace.csv"))
    data_io.write_matrix_csv(result.final_P, os.path.join(out, "coefficients.csv"))
    data_io.write_report_json(
        os.path.join(out, "report.json"),
        metrics=_summary(result),
        config=cfg,
        constants=constants,
    )
    return 0


def _parse_synthetic(text):
    mapping = {"d": int, "m": int, "n": int, "k": int,
               "drift": float, "noise": float, "cond": float, "seed": int}
    values = {}
    for part in text.split(","):
        key, _, raw = part.partition("=")
        key = key.strip()
        if key not in mapping:
            raise ValueError(f"--synthetic: unknown key {key!r} (use {sorted(mapping)})")
        values[key] = mapping[key](raw)
    for key in ("d", "m", "n", "k"):
        if key not in values:
            raise ValueError(f"--synthetic: missing required key {key!r}")
    return data_io.SyntheticSpec(
        d=values["d"], m=values["m"], n_per_task=values["n"], active_rows=values["k"],
        smoothness_drift=values.get("drift", 0.1), noise_std=values.get("noise", 0.1),
        condition=values.get("cond", 1.0), seed=values.get("seed", 0),
    )


def cmd_compare(args):
    cfg = _resolved(
        args,
        {"tasks": None, "prior": None, "synthetic": None, "out": None,
         **_REG_DEFAULTS, **_SOLVER_DEFAULTS},
        required=("out",),
    )
    if bool(cfg["tasks"]) == bool(cfg["synthetic"]):
        raise ValueError("compare needs exactly one of --tasks or --synthetic")
    if cfg["synthetic"]:
        spec = _parse_synthetic(cfg["synthetic"])
        params = RegularizationParams(lam=cfg["lam"], theta=cfg["theta"], eps=cfg["eps"])
        instance = data_io.generate_synthetic(spec, params=params).instance
    else:
        instance = _load_instance(cfg)
    constants = compute_constants(instance)
    configs = [_solver_config(cfg, name, constants) for name in ALGORITHMS]
    comparison = run_comparison(instance, configs)
    for name, message in comparison.errors.items():
        print(f"warning: {name} failed: {message}", file=sys.stderr)
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    data_io.write_trace_csv(comparison.results, os.path.join(out, "trace.csv"))
    data_io.write_report_json(
        os.path.join(out, "report.json"),
        metrics={
            "solvers": [_summary(r) for r in comparison.results],
            "errors": comparison.errors,
        },
        config=cfg,
        constants=constants,
    )
    return 0


def cmd_gen(args):
    cfg = _resolved(
        args,
        {"d": 20, "m": 5, "n": 100, "k": 5, "drift": 0.1, "noise": 0.1,
         "cond": 1.0, "seed": 0, "out": None},
        required=("out",),
    )
    spec = data_io.SyntheticSpec(
        d=cfg["d"], m=cfg["m"], n_per_task=cfg["n"], active_rows=cfg["k"],
        smoothness_drift=cfg["drift"], noise_std=cfg["noise"],
        condition=cfg["cond"], seed=cfg["seed"],
    )
    data = data_io.generate_synthetic(spec)
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    width = len(str(cfg["m"]))
    for i, task in enumerate(data.instance.tasks, start=1):
        data_io.write_task_csv(task, os.path.join(out, f"task_{i:0{width}d}.csv"))
    data_io.write_matrix_csv(data.true_P, os.path.join(out, "true_P.csv"))
    data_io.write_report_json(os.path.join(out, "report.json"), config=cfg)
    return 0


def cmd_prior(args):
    cfg = _resolved(
        args,
        {"tasks": None, "mode": "natural", "threshold": 0.9, "max_constraints": None,
         "include_negative": False, "fraction": 0.05, "seed": 0, "out": None},
        required=("tasks", "out"),
    )
    tasks = data_io.load_tasks_csv(cfg["tasks"])
    build = prior_mod.PriorBuildConfig(
        mode=cfg["mode"],
        correlation_threshold=cfg["threshold"],
        max_constraints=cfg["max_constraints"],
        include_negative=cfg["include_negative"],
        duplicate_fraction=cfg["fraction"],
        seed=cfg["seed"],
    )
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    if cfg["mode"] == "natural":
        prior = prior_mod.build_natural(tasks, build)
    else:
        augmented = prior_mod.build_artificial(tasks, build)
        prior = augmented.prior
        for path, task in zip(cfg["tasks"], augmented.tasks):
            data_io.write_task_csv(task, os.path.join(out, os.path.basename(path)))
    if prior.n_constraints == 0:
        print("warning: no feature pairs cleared the threshold; D is empty", file=sys.stderr)
    d_path = os.path.join(out, "D.csv")
    data_io.write_prior_csv(prior, d_path)
    data_io.write_provenance_json(prior, d_path)
    data_io.write_report_json(
        os.path.join(out, "report.json"),
        metrics={"constraints": prior.n_constraints, "columns": prior.n_features},
        config=cfg,
    )
    return 0


def cmd_eval(args):
    cfg = _resolved(
        args,
        {"kind": "regression", "tasks": None, "model": None, "pred": None, "out": None},
        required=("tasks", "out"),
    )
    if bool(cfg["model"]) == bool(cfg["pred"]):
        raise ValueError("eval needs exactly one of --model or --pred")
    tasks = data_io.load_tasks_csv(cfg["tasks"])
    if cfg["model"]:
        P = data_io.load_matrix_csv(cfg["model"])
        if P.shape != (tasks[0].n_features, len(tasks)):
            raise ValueError(
                f"model shape {P.shape} does not match d={tasks[0].n_features}, m={len(tasks)}"
            )
        predictions = [task.features @ P[:, i] for i, task in enumerate(tasks)]
    else:
        if len(cfg["pred"]) != len(tasks):
            raise ValueError(f"{len(cfg['pred'])} prediction files for {len(tasks)} tasks")
        predictions = [data_io.load_matrix_csv(p).ravel() for p in cfg["pred"]]
        for i, (task, pred) in enumerate(zip(tasks, predictions)):
            if pred.shape[0] != task.n_samples:
                raise ValueError(
                    f"task {i}: {pred.shape[0]} predictions for {task.n_samples} samples"
                )

    truths = [task.responses for task in tasks]
    if cfg["kind"] == "regression":
        value = metrics_mod.nmse(truths, predictions)
        report = {"kind": "regression", "nmse": value, "variance_explained": 1.0 - value}
    else:
        curves = []
        for i, (truth, scores) in enumerate(zip(truths, predictions)):
            labels = truth.astype(np.int64)
            if not np.array_equal(labels, truth):
                raise DegenerateLabelsError(f"task {i}: responses are not 0/1 labels")
            curves.append(metrics_mod.roc_auc(scores, labels))
        macro = metrics_mod.macro_roc(curves)
        report = {
            "kind": "classification",
            "per_task_auc": [c.auc for c in curves],
            "mean_auc": macro.mean_auc,
            "std_auc": macro.std_auc,
            "mean_curve": {"fpr": macro.fpr_grid, "tpr": macro.mean_tpr},
            "std_band": macro.std_tpr,
        }
    out = cfg["out"]
    os.makedirs(out, exist_ok=True)
    data_io.write_report_json(os.path.join(out, "report.json"), metrics=report, config=cfg)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
