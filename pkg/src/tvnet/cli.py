"""Command-line entry point.

Subcommands: simulate, fit, tune, evaluate, report. Structured outputs are
JSON, tabular outputs CSV; nothing is plotted in-process. Exit codes: 0 for
completed runs (convergence warnings stay in-band in the report), 2 for
input errors, 3 for numerical failures.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import metrics, reports, select, simulate
from .admm import AdmmConfig
from .design import build_design
from .errors import INPUT_ERRORS, NUMERICAL_ERRORS, PanelFormatError
from .outer import OuterConfig, fit as outer_fit, init_sigma, sample_partial_correlations
from .select import DfConfig

METHOD_CHOICES = ("gen", "gfl", "lasso", "sample")


def _load_config(path):
    """Split a flat JSON config into the three config dataclasses."""
    overrides = {}
    if path:
        with open(path) as fh:
            overrides = json.load(fh)
        if not isinstance(overrides, dict):
            raise PanelFormatError("config file must hold a JSON object")
    admm_keys = {k: overrides[k] for k in ("a", "max_iter", "eps_abs", "eps_rel") if k in overrides}
    outer_keys = {k: overrides[k] for k in ("tol_sigma", "tol_theta", "max_outer") if k in overrides}
    df_keys = {k: overrides[k] for k in ("eta", "active_tol") if k in overrides}
    known = set(admm_keys) | set(outer_keys) | set(df_keys)
    unknown = set(overrides) - known
    if unknown:
        raise PanelFormatError(f"unknown config keys: {sorted(unknown)}")
    return AdmmConfig(**admm_keys), outer_keys, DfConfig(**df_keys)


def _parse_grid(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise PanelFormatError(f"grid {text!r} is not a comma-separated float list") from None
    if not values:
        raise PanelFormatError("grid is empty")
    return np.asarray(values)


def _default_grids(dataset):
    """Data-driven log-spaced default grids.

    The sparsity grid spans 1% to ~32% of the full-shrinkage level
    ||2/n X'Y||_inf at the initial sigma; the smoothness grid covers
    0.03 to 16.
    """
    design = build_design(dataset, init_sigma(dataset))
    lam_max = np.abs((2.0 / dataset.n) * design.Xty).max()
    grid1 = lam_max * np.logspace(-2.0, -0.5, 5)
    grid2 = np.logspace(-1.5, 1.2, 5)
    return grid1, grid2


def _threads(args):
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("TVNET_THREADS")
    return max(1, int(env)) if env else 1


def _cmd_simulate(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec_seed, data_seed = [s.generate_state(1)[0] for s in np.random.SeedSequence(args.seed).spawn(2)]
    spec = simulate.make_spec(args.scenario, seed=int(spec_seed))
    dataset, truth = simulate.generate(spec, n=args.n, seed=int(data_seed))
    grid = np.linspace(0.0, 1.0, spec.T)
    raw = dataset.data  # centered; the panel carries the centered values
    # Re-add the mean path so the stored panel looks like raw recordings.
    raw = raw + simulate.mean_path(grid)[:, None, None]
    reports.write_panel(out / "panel.csv", raw)
    reports.write_json(out / "truth.json", reports.truth_payload(spec, truth))
    reports.write_json(out / "scenario_spec.json", spec.to_dict())
    print(f"wrote panel.csv, truth.json, scenario_spec.json to {out}")
    return 0


def _fit_dataset(dataset, var_names, args):
    admm_cfg, outer_keys, df_cfg = _load_config(args.config)
    if args.method == "sample":
        theta = sample_partial_correlations(dataset)
        sigma = _sample_sigma(dataset)
        report = {
            "method": "sample",
            "lambda1": None,
            "lambda2": None,
            "df": None,
            "bic": None,
            "converged": True,
            "var_names": list(var_names),
            "pair_labels": reports.pair_labels(var_names),
            "theta": theta.tolist(),
            "sigma": sigma.tolist(),
            "edges_per_time": [
                [reports.pair_labels(var_names)[j] for j in np.flatnonzero(theta[k] != 0.0)]
                for k in range(theta.shape[0])
            ],
        }
        return report
    outer_cfg = OuterConfig(method=args.method, **outer_keys)
    result = outer_fit(dataset, args.lambda1, args.lambda2, outer_cfg, admm_cfg)
    return reports.fit_report(result, var_names)


def _sample_sigma(dataset):
    from .design import sample_covariance
    from .linalg import symmetrize

    sigma = np.empty((dataset.T, dataset.p))
    for k in range(dataset.T):
        s = symmetrize(sample_covariance(dataset, k))
        if np.linalg.cond(s) > 1e10:
            s = s + (1e-6 * np.trace(s) / dataset.p) * np.eye(dataset.p)
        sigma[k] = np.diag(np.linalg.inv(s))
    return sigma


def _cmd_fit(args):
    dataset, var_names = reports.read_panel(args.panel)
    report = _fit_dataset(dataset, var_names, args)
    reports.write_json(args.out, report)
    print(f"wrote fit report to {args.out}")
    return 0


def _cmd_tune(args):
    dataset, var_names = reports.read_panel(args.panel)
    if args.method == "sample":
        raise PanelFormatError("the sample baseline has no tuning parameters")
    admm_cfg, outer_keys, df_cfg = _load_config(args.config)
    default1, default2 = _default_grids(dataset)
    grid1 = _parse_grid(args.grid1) if args.grid1 else default1
    grid2 = _parse_grid(args.grid2) if args.grid2 else default2
    if args.method == "lasso":
        grid2 = np.zeros(1)
    outer_cfg = OuterConfig(method=args.method, **outer_keys)
    surface, best = select.grid_search(
        dataset, args.method, grid1, grid2, outer_cfg, admm_cfg, n_jobs=_threads(args)
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports.write_surface_csv(out / "surface.csv", surface)
    reports.write_json(out / "best_fit.json", reports.fit_report(best, var_names))
    print(
        f"tuned {args.method}: best lambda1={best.lambda1} lambda2={best.lambda2} "
        f"bic={best.bic}; wrote surface.csv and best_fit.json to {out}"
    )
    return 0


def _cmd_evaluate(args):
    report = reports.read_json(args.fit)
    truth = reports.read_json(args.truth)
    theta_hat = reports.report_theta(report)
    theta_true = np.asarray(truth["theta"], dtype=float)
    support = np.asarray(truth["support"], dtype=bool)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = {
        "estimation_error": metrics.estimation_error(theta_hat, theta_true),
        "auc": metrics.auc(theta_hat, support),
    }
    reports.write_json(out / "metrics.json", payload)
    reports.write_trajectories_csv(
        out / "trajectories.csv", theta_hat, theta_true, report["pair_labels"]
    )
    print(json.dumps(payload))
    return 0


def _cmd_report(args):
    report = reports.read_json(args.fit)
    theta = reports.report_theta(report)
    labels = report["pair_labels"]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports.write_occurrence_csv(out / "occurrence_counts.csv", theta, labels)
    reports.write_heat_table_csv(out / "heat_table.csv", theta, labels)
    T = theta.shape[0]
    first_half = (T + 1) // 2
    active = theta != 0.0
    reports.write_json(
        out / "summary.json",
        {
            "total_connections": int(active.sum()),
            "first_half_connections": int(active[:first_half].sum()),
            "second_half_connections": int(active[first_half:].sum()),
        },
    )
    print(f"wrote occurrence_counts.csv, heat_table.csv, summary.json to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="tvnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="generate a synthetic benchmark panel")
    p_sim.add_argument("--scenario", type=int, choices=(1, 2), required=True)
    p_sim.add_argument("--n", type=int, required=True, help="subjects per time point")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_fit = sub.add_parser("fit", help="fit one (lambda1, lambda2) to a panel")
    p_fit.add_argument("--panel", required=True)
    p_fit.add_argument("--method", choices=METHOD_CHOICES, required=True)
    p_fit.add_argument("--lambda1", type=float, default=0.0)
    p_fit.add_argument("--lambda2", type=float, default=0.0)
    p_fit.add_argument("--config", help="JSON overriding solver defaults")
    p_fit.add_argument("--out", required=True, help="output report JSON path")
    p_fit.set_defaults(func=_cmd_fit)

    p_tune = sub.add_parser("tune", help="grid search over (lambda1, lambda2)")
    p_tune.add_argument("--panel", required=True)
    p_tune.add_argument("--method", choices=("gen", "gfl", "lasso"), required=True)
    p_tune.add_argument("--grid1", help="comma-separated lambda1 grid")
    p_tune.add_argument("--grid2", help="comma-separated lambda2 grid")
    p_tune.add_argument("--threads", type=int, help="worker processes (env TVNET_THREADS)")
    p_tune.add_argument("--config", help="JSON overriding solver defaults")
    p_tune.add_argument("--out", required=True, help="output directory")
    p_tune.set_defaults(func=_cmd_tune)

    p_eval = sub.add_parser("evaluate", help="score a fit report against a truth file")
    p_eval.add_argument("--fit", required=True)
    p_eval.add_argument("--truth", required=True)
    p_eval.add_argument("--out", required=True, help="output directory")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_rep = sub.add_parser("report", help="aggregate a fit report into summary CSVs")
    p_rep.add_argument("--fit", required=True)
    p_rep.add_argument("--out", required=True, help="output directory")
    p_rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
