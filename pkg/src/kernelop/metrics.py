"""Error metrics and statistics over repeated simulations."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, fields

import numpy as np

#: Column order of the results CSV shared with the plotting front end.
CSV_HEADER = ["example", "norm", "solver", "nsr", "n0", "seed",
              "rel_error", "time_s", "lambda_or_stop"]


@dataclass
class RunSummary:
    """One solver run: identification keys plus its scalar outcomes."""

    example: str
    norm: str
    solver: str
    nsr: float
    n0: int
    seed: int
    rel_error: float
    time_s: float
    lambda_or_stop: float


def relative_l2_error(phi_hat: np.ndarray, phi_true_fn, s_grid: np.ndarray) -> float:
    """Relative L2 error of a piecewise-constant estimate on the s-cells.

    Both norms are Riemann sums with the Lebesgue cell weight, which cancels
    in the ratio; the truth is sampled at the cell nodes ``s_l``.
    """
    phi_hat = np.asarray(phi_hat, dtype=float)
    truth = np.asarray(phi_true_fn(s_grid), dtype=float)
    denom = np.linalg.norm(truth)
    if denom == 0.0:
        raise ValueError("true kernel has zero norm on the grid")
    return float(np.linalg.norm(phi_hat - truth) / denom)


def _quartiles(values: np.ndarray):
    q1, med, q3 = np.percentile(values, [25, 50, 75])  # linear interpolation
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = values[(values >= lo_fence) & (values <= hi_fence)]
    outliers = values[(values < lo_fence) | (values > hi_fence)]
    return {
        "median": float(med),
        "q1": float(q1),
        "q3": float(q3),
        "whisker_low": float(inside.min()),
        "whisker_high": float(inside.max()),
        "outliers": [float(v) for v in np.sort(outliers)],
        "count": int(values.size),
    }


def summarize(runs) -> dict:
    """Box-plot statistics of the relative errors per (norm, solver) group.

    Keys are the verbatim ``(norm, solver)`` pairs; values carry median,
    quartiles, 1.5*IQR whiskers and the outlier list.
    """
    groups: dict = {}
    for run in runs:
        groups.setdefault((run.norm, run.solver), []).append(run.rel_error)
    if not groups:
        raise ValueError("no runs to summarize")
    return {key: _quartiles(np.asarray(vals, dtype=float))
            for key, vals in groups.items()}


def write_runs_csv(path, runs, append: bool = False) -> None:
    """Write RunSummary rows with the documented header."""
    new_file = not (append and os.path.exists(path))
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(CSV_HEADER)
        for run in runs:
            writer.writerow([getattr(run, f.name) for f in fields(RunSummary)])


def read_runs_csv(path) -> list:
    """Read back RunSummary rows written by :func:`write_runs_csv`."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(RunSummary(
                example=row["example"], norm=row["norm"], solver=row["solver"],
                nsr=float(row["nsr"]), n0=int(row["n0"]), seed=int(row["seed"]),
                rel_error=float(row["rel_error"]), time_s=float(row["time_s"]),
                lambda_or_stop=float(row["lambda_or_stop"]),
            ))
    return out
