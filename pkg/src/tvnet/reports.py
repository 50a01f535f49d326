"""File formats: panel CSV, fit-report JSON, truth JSON, and summary CSVs.

Floats are written with repr (shortest round-trip form), so write -> read
-> write is byte stable and JSON reports round-trip losslessly.

Panel CSV schema: header `time_index,subject_index,<var names...>`, one row
per (time, subject), forming a complete T x n grid with 1-based indices.
"""

import csv
import json

import numpy as np

from .design import center_per_timepoint, pair_list
from .errors import PanelFormatError


def write_panel(path, dataset_raw, var_names=None):
    """Write raw (uncentered) panel data of shape (T, n, p) as CSV."""
    data = np.asarray(dataset_raw, dtype=float)
    T, n, p = data.shape
    names = var_names or [f"x{i}" for i in range(1, p + 1)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_index", "subject_index", *names])
        for k in range(T):
            for s in range(n):
                writer.writerow([k + 1, s + 1, *[repr(float(v)) for v in data[k, s]]])


def read_panel(path):
    """Parse a panel CSV into (centered TemporalDataset, var_names).

    Raises PanelFormatError naming the offending row for malformed input:
    non-numeric cells, inconsistent width, or an incomplete grid.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise PanelFormatError("panel file is empty") from None
        if len(header) < 3 or header[0] != "time_index" or header[1] != "subject_index":
            raise PanelFormatError("header must start with time_index,subject_index")
        var_names = header[2:]
        p = len(var_names)
        cells = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 2:
                raise PanelFormatError(f"row {lineno}: expected {p + 2} fields, got {len(row)}")
            try:
                k = int(row[0])
                s = int(row[1])
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise PanelFormatError(f"row {lineno}: {exc}") from None
            if (k, s) in cells:
                raise PanelFormatError(f"row {lineno}: duplicate cell (time={k}, subject={s})")
            cells[(k, s)] = values

    if not cells:
        raise PanelFormatError("panel contains no data rows")
    times = sorted({k for k, _ in cells})
    subjects = sorted({s for _, s in cells})
    T, n = len(times), len(subjects)
    if times != list(range(1, T + 1)) or subjects != list(range(1, n + 1)):
        raise PanelFormatError("time/subject indices must be 1..T and 1..n")
    if len(cells) != T * n:
        raise PanelFormatError(f"incomplete grid: {len(cells)} rows for {T}x{n} cells")
    raw = np.empty((T, n, p))
    for (k, s), values in cells.items():
        raw[k - 1, s - 1] = values
    return center_per_timepoint(raw), var_names


def pair_labels(var_names):
    p = len(var_names)
    return [f"{var_names[i - 1]}-{var_names[j - 1]}" for i, j in pair_list(p)]


def fit_report(result, var_names):
    """JSON-ready dictionary for one fit."""
    theta = np.asarray(result.theta)
    labels = pair_labels(var_names)
    edges = [
        [labels[j] for j in np.flatnonzero(theta[k] != 0.0)]
        for k in range(theta.shape[0])
    ]
    report = {
        "method": result.method,
        "lambda1": result.lambda1,
        "lambda2": result.lambda2,
        "df": None if result.df is None or not np.isfinite(result.df) else float(result.df),
        "bic": None if not np.isfinite(result.bic) else float(result.bic),
        "converged": bool(result.converged),
        "var_names": list(var_names),
        "pair_labels": labels,
        "theta": theta.tolist(),
        "sigma": np.asarray(result.sigma).tolist(),
        "edges_per_time": edges,
    }
    if result.method in ("gfl", "lasso"):
        report["fused_groups_per_pair"] = [
            _count_fused_groups(theta[:, j]) for j in range(theta.shape[1])
        ]
    return report


def _count_fused_groups(traj, tol=1e-8):
    count = 1 if abs(traj[0]) > tol else 0
    for k in range(1, len(traj)):
        if abs(traj[k]) > tol and abs(traj[k] - traj[k - 1]) > tol:
            count += 1
    return count


def write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise PanelFormatError(f"{path}: {exc}") from None


def truth_payload(spec, truth):
    return {
        "spec": spec.to_dict(),
        "edges": [list(e) for e in truth.edges],
        "theta": truth.theta.tolist(),
        "support": truth.support.astype(int).tolist(),
    }


def report_theta(report):
    theta = np.asarray(report.get("theta", []), dtype=float)
    if theta.ndim != 2:
        raise PanelFormatError("report theta must be a T x pairs array")
    return theta


def write_surface_csv(path, surface):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda1", "lambda2", "bic", "df", "converged"])
        for i, l1 in enumerate(surface.lambda1_grid):
            for j, l2 in enumerate(surface.lambda2_grid):
                writer.writerow(
                    [
                        repr(float(l1)),
                        repr(float(l2)),
                        repr(float(surface.bic[i, j])),
                        repr(float(surface.df[i, j])),
                        int(surface.converged[i, j]),
                    ]
                )


def write_trajectories_csv(path, theta_hat, theta_true, labels):
    """Per-(pair, time) estimated and true values, ready for plotting."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_index", "pair", "rho_hat", "rho_true"])
        for k in range(theta_hat.shape[0]):
            for j, label in enumerate(labels):
                true_val = "" if theta_true is None else repr(float(theta_true[k, j]))
                writer.writerow([k + 1, label, repr(float(theta_hat[k, j])), true_val])


def write_occurrence_csv(path, theta, labels):
    """Per-pair connection counts: total and per scanning-period half."""
    T = theta.shape[0]
    first_half = (T + 1) // 2
    active = theta != 0.0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair", "total", "first_half", "second_half"])
        for j, label in enumerate(labels):
            writer.writerow(
                [
                    label,
                    int(active[:, j].sum()),
                    int(active[:first_half, j].sum()),
                    int(active[first_half:, j].sum()),
                ]
            )


def write_heat_table_csv(path, theta, labels):
    """Per-time estimated values for every pair (heat-table layout)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time_index", *labels])
        for k in range(theta.shape[0]):
            writer.writerow([k + 1, *[repr(float(v)) for v in theta[k]]])
