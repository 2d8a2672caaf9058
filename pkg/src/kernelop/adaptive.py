"""Assembly of the data-adaptive regularization system.

From the tabulated ``g`` array (n0*J rows, n_s columns) this module builds

* ``rho``   -- the exploration density on the s-cells, ``rho_l`` proportional
  to ``sum_kj |g(kj, l)|`` and normalized so ``sum_l rho_l * ds = 1``;
* ``G``     -- the Gram kernel ``G = g^T g / (n0 J)``;
* ``Gbar``  -- the data-adaptive reproducing kernel
  ``Gbar(l, l') = G(l, l') / (rho_l rho_l')``, set to zero on cells the data
  never explores (``rho = 0``);
* ``xi``    -- the basis array ``xi = g Gbar ds`` whose rows represent the
  point-evaluation functionals of the forward map;
* ``Sigma`` -- the normal matrix ``Sigma = g xi^T ds``, symmetric positive
  semidefinite; every estimator acts on ``(Sigma, f)``.

Estimators are linear combinations of the rows of ``xi`` and evaluate as
piecewise-constant functions on the s-cells: ``phi_hat = xi^T c``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolverReport:
    """Diagnostics of one regularized solve.

    ``method`` is one of TikhonovLC, TikhonovGCV, IterativeLC, IterativeDP,
    Hybrid (plus MinimalNormLS for the unregularized solve). Histories are
    nonempty for iterative methods; ``flags`` records anomalies such as
    ``no_corner`` or ``no_stop``.
    """

    method: str
    lambda_: float | None = None
    stop_iteration: int | None = None
    residual_history: list = field(default_factory=list)
    solution_norm_history: list = field(default_factory=list)
    wall_time_seconds: float = 0.0
    flags: list = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "lambda": self.lambda_,
            "stop_iteration": self.stop_iteration,
            "residual_history": [float(v) for v in self.residual_history],
            "solution_norm_history": [float(v) for v in self.solution_norm_history],
            "wall_time_seconds": float(self.wall_time_seconds),
        }


@dataclass
class Estimate:
    """A solved kernel estimate.

    ``phi_values`` are the piecewise-constant kernel values on the s-cells.
    For RKHS-basis estimators ``coefficients`` has length n0*J and
    ``phi_values = xi^T coefficients``; for the weighted-L2 baseline the
    coefficients *are* the cell values (length n_s).
    """

    coefficients: np.ndarray
    phi_values: np.ndarray
    norm_kind: str
    solver_kind: str
    report: SolverReport


@dataclass
class AdaptiveSystem:
    """All discrete objects of the data-adaptive system for one dataset.

    Immutable after construction; safe for concurrent read-only use by
    multiple solvers.
    """

    rho: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    Gbar: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    Sigma: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    ds: float = 0.0

    @property
    def n_rows(self) -> int:
        return self.Sigma.shape[0]

    @property
    def n_s(self) -> int:
        return self.xi.shape[1]


def build_exploration_measure(g: np.ndarray) -> np.ndarray:
    """Exploration density on the s-cells from the tabulated ``g`` array.

    Returns ``rho`` with ``rho_l`` proportional to the column sums of
    ``|g|``, normalized as a density: ``sum_l rho_l * ds = 1`` with
    ``ds = 1/n_s``. Raises on an all-zero ``g`` (nothing explores any cell).
    """
    g = np.asarray(g, dtype=float)
    column_mass = np.abs(g).sum(axis=0)
    total = column_mass.sum()
    if total == 0.0:
        raise ValueError("degenerate data: exploration measure undefined")
    ds = 1.0 / g.shape[1]
    return column_mass / (total * ds)


def assemble(g: np.ndarray, f: np.ndarray) -> AdaptiveSystem:
    """Assemble the full adaptive system from ``g`` and the outputs ``f``.

    Cells with ``rho = 0`` are masked out of the reproducing kernel, hence
    contribute nothing to ``xi`` or ``Sigma``; estimators vanish there.
    ``Sigma`` is symmetrized after assembly to suppress floating-point
    asymmetry ahead of the eigendecomposition.
    """
    g = np.asarray(g, dtype=float)
    f = np.asarray(f, dtype=float)
    n_rows, n_s = g.shape
    if f.shape != (n_rows,):
        raise ValueError(f"f has shape {f.shape}, expected ({n_rows},)")
    ds = 1.0 / n_s
    rho = build_exploration_measure(g)
    G = (g.T @ g) / n_rows
    denom = np.outer(rho, rho)
    Gbar = np.divide(G, denom, out=np.zeros_like(G), where=denom > 0)
    Gbar = 0.5 * (Gbar + Gbar.T)
    xi = g @ Gbar * ds
    Sigma = g @ xi.T * ds
    Sigma = 0.5 * (Sigma + Sigma.T)
    return AdaptiveSystem(rho=rho, G=G, Gbar=Gbar, xi=xi, Sigma=Sigma,
                          f=f.copy(), ds=ds)


def eval_estimate(system, coefficients: np.ndarray) -> np.ndarray:
    """Kernel values ``xi^T c`` on the s-cells for a coefficient vector."""
    coefficients = np.asarray(coefficients, dtype=float)
    if coefficients.shape != (system.xi.shape[0],):
        raise ValueError(
            f"coefficients has shape {coefficients.shape}, "
            f"expected ({system.xi.shape[0]},)"
        )
    return system.xi.T @ coefficients


def spectrum_csv(system, path) -> None:
    """Dump the eigenvalue spectrum of ``Sigma`` to a CSV for diagnostics."""
    values = np.linalg.eigvalsh(system.Sigma)[::-1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "eigenvalue"])
        for i, v in enumerate(values):
            writer.writerow([i, repr(float(v))])
