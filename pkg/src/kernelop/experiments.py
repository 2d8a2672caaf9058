"""Experiment harness: dataset generation, solver sweeps, CSV artifacts.

Four experiment families are supported, mirroring the evaluation suite:

* ``accuracy``           -- all (norm, solver) pairs on repeated simulations
  at one noise level; box-plot material.
* ``noise_convergence``  -- the same grid over a decreasing noise-to-signal
  schedule, plus the oracle-optimal iterative error per norm (solver name
  ``IterOpt``: the smallest error over all iterations).
* ``scalability``        -- wall-clock times over a growing sample count,
  with the per-size iteration caps.
* ``single_solve``       -- one estimator, dumped as (s, phi_hat, phi_true).

Every simulation is a pure function of ``(config, base_seed + sim_index)``,
so parallel and serial runs produce the same rows; rows are sorted before
writing. Reported times cover assembly plus solve (the eigendecomposition
is billed to each direct solver); dataset generation is excluded.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .adaptive import assemble
from .baselines import assemble_gaussian, assemble_l2rho, solve_l2rho
from .baselines import _backsolve, _rect_gkb
from .data import TRUE_KERNELS, generate_dataset, save_dataset
from .direct import eigensystem, minimal_norm_ls, solve_tikhonov
from .krylov import (DiscrepancyStop, LCurveStop, run_gkb, run_hybrid,
                     run_iterative, solution_y)
from .metrics import RunSummary, relative_l2_error, write_runs_csv
from .operators import ExampleId

NSR_SCHEDULE = [1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]
N0_SCHEDULE = [6, 12, 18, 24, 30, 36]
LMAX_SCHEDULE = [30, 30, 40, 40, 50, 50]

ALL_EXAMPLES = ["integral", "nonlocal", "aggregation"]
ALL_NORMS = ["HGbar", "HGauss", "L2rho"]
ALL_SOLVERS = ["TikhonovLC", "TikhonovGCV", "IterativeLC", "Hybrid"]
KNOWN_SOLVERS = ALL_SOLVERS + ["IterativeDP", "MinimalNormLS"]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Settings of one experiment run; defaults mirror the evaluation suite."""

    experiment: str = "accuracy"
    examples: list = field(default_factory=lambda: list(ALL_EXAMPLES))
    norms: list = field(default_factory=lambda: list(ALL_NORMS))
    solvers: list = field(default_factory=lambda: list(ALL_SOLVERS))
    J: int = 200
    n_s: int | None = None
    n0: int = 30
    nsr_list: list = field(default_factory=lambda: [0.1])
    n_sims: int = 50
    l_max: int = 50
    base_seed: int = 0
    out_dir: str = "results"
    n0_list: list = field(default_factory=lambda: list(N0_SCHEDULE))
    l_max_schedule: list = field(default_factory=lambda: list(LMAX_SCHEDULE))
    sigma0: float = 0.1
    include_iter_opt: bool = True

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in ("accuracy", "noise_convergence",
                                   "scalability", "single_solve"):
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for name in ("examples", "norms", "solvers", "nsr_list", "n0_list"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a nonempty list")
        bad = [e for e in self.examples
               if e not in [x.value for x in ExampleId]]
        if bad:
            raise ConfigError(f"unknown examples {bad}")
        if set(self.norms) - set(ALL_NORMS):
            raise ConfigError(f"unknown norms {set(self.norms) - set(ALL_NORMS)}")
        if set(self.solvers) - set(KNOWN_SOLVERS):
            raise ConfigError(
                f"unknown solvers {set(self.solvers) - set(KNOWN_SOLVERS)}")
        if self.J < 2 or self.n_sims < 1 or self.n0 < 1 or self.l_max < 1:
            raise ConfigError("J, n0, n_sims and l_max must be positive")
        if len(self.l_max_schedule) != len(self.n0_list):
            raise ConfigError("l_max_schedule must match n0_list in length")
        return self

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        return cls(**raw).validate()


def _lambda_or_stop(report) -> float:
    if report.lambda_ is not None:
        return float(report.lambda_)
    if report.stop_iteration is not None:
        return float(report.stop_iteration)
    return 0.0


def _solve_rkhs_family(norm_kind, g, f, solvers, l_max, noise_norm, sigma0):
    """All requested solvers on one RKHS system; returns (solver, est, time)."""
    t0 = time.perf_counter()
    if norm_kind == "HGbar":
        system = assemble(g, f)
    else:
        system = assemble_gaussian(g, f, sigma0=sigma0)
    t_assemble = time.perf_counter() - t0
    out = []
    eig = None
    t_eig = 0.0
    for solver in solvers:
        if solver in ("TikhonovLC", "TikhonovGCV"):
            if eig is None:
                t0 = time.perf_counter()
                eig = eigensystem(system)
                t_eig = time.perf_counter() - t0
            selector = "lcurve" if solver == "TikhonovLC" else "gcv"
            est = solve_tikhonov(system, selector, eig, norm_kind=norm_kind)
            out.append((solver, est,
                        t_assemble + t_eig + est.report.wall_time_seconds))
        elif solver == "IterativeLC":
            est = run_iterative(system, LCurveStop(), l_max=l_max,
                                norm_kind=norm_kind)
            out.append((solver, est,
                        t_assemble + est.report.wall_time_seconds))
        elif solver == "IterativeDP":
            est = run_iterative(system, DiscrepancyStop(noise_norm=noise_norm),
                                l_max=l_max, norm_kind=norm_kind)
            out.append((solver, est,
                        t_assemble + est.report.wall_time_seconds))
        elif solver == "Hybrid":
            est = run_hybrid(system, l_max=l_max, norm_kind=norm_kind)
            out.append((solver, est,
                        t_assemble + est.report.wall_time_seconds))
        elif solver == "MinimalNormLS":
            if eig is None:
                t0 = time.perf_counter()
                eig = eigensystem(system)
                t_eig = time.perf_counter() - t0
            est = minimal_norm_ls(system, eig, norm_kind=norm_kind)
            out.append((solver, est,
                        t_assemble + t_eig + est.report.wall_time_seconds))
    return system, t_assemble, out


def _iter_opt_error(system, phi_true_values, l_max) -> tuple[float, int]:
    """Smallest relative error over all bidiagonalization iterates."""
    state = run_gkb(system, l_max=l_max)
    if state.l == 0:
        return float(np.linalg.norm(phi_true_values) and 1.0), 0
    XQ = system.xi.T @ state.Q[:, :state.l]
    denom = np.linalg.norm(phi_true_values)
    best, best_l = np.inf, 0
    for l in range(1, state.l + 1):
        phi = XQ[:, :l] @ solution_y(state, l)
        err = float(np.linalg.norm(phi - phi_true_values) / denom)
        if err < best:
            best, best_l = err, l
    return best, best_l


def _iter_opt_error_l2rho(system, phi_true_values, l_max) -> tuple[float, int]:
    (V, alphas, betas, rhos, thetas, phis,
     res_hist, norm_hist, l_run) = _rect_gkb(system.A_tilde, system.f, l_max)
    denom = np.linalg.norm(phi_true_values)
    best, best_l = np.inf, 0
    n_s = system.n_s
    for l in range(1, l_run + 1):
        ct = V[:, :l] @ _backsolve(rhos, thetas, phis, l)
        phi = np.zeros(n_s)
        phi[system.mask] = system.B_half_inv * ct
        err = float(np.linalg.norm(phi - phi_true_values) / denom)
        if err < best:
            best, best_l = err, l
    return best, best_l


def run_simulation(cfg: ExperimentConfig, example: str, nsr: float, n0: int,
                   l_max: int, sim_index: int,
                   include_iter_opt: bool = False) -> list:
    """One end-to-end simulation; a pure function of the arguments."""
    seed = cfg.base_seed + sim_index
    phi_true = TRUE_KERNELS[ExampleId(example)]
    ds = generate_dataset(example, phi_true, J=cfg.J, n_s=cfg.n_s, n0=n0,
                          nsr=nsr, seed=seed)
    noise_norm = float(np.linalg.norm(ds.noise))
    phi_true_values = np.asarray(phi_true(ds.grids.s), dtype=float)
    rows = []

    def add(solver, est, total_time):
        err = relative_l2_error(est.phi_values, phi_true, ds.grids.s)
        rows.append(RunSummary(
            example=example, norm=est.norm_kind, solver=solver, nsr=nsr,
            n0=n0, seed=seed, rel_error=err, time_s=float(total_time),
            lambda_or_stop=_lambda_or_stop(est.report)))

    for norm_kind in cfg.norms:
        if norm_kind in ("HGbar", "HGauss"):
            system, t_asm, solved = _solve_rkhs_family(
                norm_kind, ds.g, ds.f, cfg.solvers, l_max, noise_norm,
                cfg.sigma0)
            for solver, est, total in solved:
                add(solver, est, total)
            if include_iter_opt:
                t0 = time.perf_counter()
                err, stop = _iter_opt_error(system, phi_true_values, l_max)
                rows.append(RunSummary(
                    example=example, norm=norm_kind, solver="IterOpt",
                    nsr=nsr, n0=n0, seed=seed, rel_error=err,
                    time_s=t_asm + time.perf_counter() - t0,
                    lambda_or_stop=float(stop)))
        else:
            t0 = time.perf_counter()
            system = assemble_l2rho(ds.g, ds.f)
            t_asm = time.perf_counter() - t0
            for solver in cfg.solvers:
                est = solve_l2rho(system, method=solver, l_max=l_max,
                                  noise_norm=noise_norm)
                add(solver, est, t_asm + est.report.wall_time_seconds)
            if include_iter_opt:
                t0 = time.perf_counter()
                err, stop = _iter_opt_error_l2rho(system, phi_true_values,
                                                  l_max)
                rows.append(RunSummary(
                    example=example, norm=norm_kind, solver="IterOpt",
                    nsr=nsr, n0=n0, seed=seed, rel_error=err,
                    time_s=t_asm + time.perf_counter() - t0,
                    lambda_or_stop=float(stop)))
    return rows


def _task(args):
    return run_simulation(*args)


def _run_tasks(tasks, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        results = [_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks, chunksize=1))
    rows = [row for batch in results for row in batch]
    rows.sort(key=lambda r: (r.example, r.norm, r.solver, r.nsr, r.n0, r.seed))
    return rows


def run_accuracy(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Accuracy experiment rows over (examples x norms x solvers x sims)."""
    nsr = cfg.nsr_list[0]
    tasks = [(cfg, example, nsr, cfg.n0, cfg.l_max, s, False)
             for example in cfg.examples for s in range(cfg.n_sims)]
    return _run_tasks(tasks, jobs)


def run_noise_convergence(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Noise sweep rows; adds the per-norm oracle iterative error."""
    nsr_list = cfg.nsr_list if cfg.nsr_list != [0.1] else list(NSR_SCHEDULE)
    tasks = [(cfg, example, nsr, cfg.n0, cfg.l_max, s, cfg.include_iter_opt)
             for example in cfg.examples for nsr in nsr_list
             for s in range(cfg.n_sims)]
    return _run_tasks(tasks, jobs)


def run_scalability(cfg: ExperimentConfig) -> list:
    """Timing rows over the sample-count schedule (always sequential)."""
    rows = []
    for n0, l_max in zip(cfg.n0_list, cfg.l_max_schedule):
        for s in range(cfg.n_sims):
            rows.extend(run_simulation(cfg, cfg.examples[0],
                                       cfg.nsr_list[0], n0, l_max, s))
    rows.sort(key=lambda r: (r.example, r.norm, r.solver, r.nsr, r.n0, r.seed))
    return rows


def run_single_solve(cfg: ExperimentConfig):
    """One dataset, one (norm, solver); returns (rows, table, report)."""
    example = cfg.examples[0]
    phi_true = TRUE_KERNELS[ExampleId(example)]
    ds = generate_dataset(example, phi_true, J=cfg.J, n_s=cfg.n_s, n0=cfg.n0,
                          nsr=cfg.nsr_list[0], seed=cfg.base_seed)
    noise_norm = float(np.linalg.norm(ds.noise))
    norm_kind, solver = cfg.norms[0], cfg.solvers[0]
    if norm_kind in ("HGbar", "HGauss"):
        _, _, solved = _solve_rkhs_family(norm_kind, ds.g, ds.f, [solver],
                                          cfg.l_max, noise_norm, cfg.sigma0)
        est = solved[0][1]
        total = solved[0][2]
    else:
        system = assemble_l2rho(ds.g, ds.f)
        est = solve_l2rho(system, method=solver, l_max=cfg.l_max,
                          noise_norm=noise_norm)
        total = est.report.wall_time_seconds
    err = relative_l2_error(est.phi_values, phi_true, ds.grids.s)
    rows = [RunSummary(example=example, norm=norm_kind, solver=solver,
                       nsr=cfg.nsr_list[0], n0=cfg.n0, seed=cfg.base_seed,
                       rel_error=err, time_s=total,
                       lambda_or_stop=_lambda_or_stop(est.report))]
    table = np.column_stack([ds.grids.s, est.phi_values,
                             phi_true(ds.grids.s)])
    return rows, table, est.report


def generate_datasets(cfg: ExperimentConfig) -> list:
    """Write one dataset file per (example, simulation index)."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    paths = []
    for example in cfg.examples:
        phi_true = TRUE_KERNELS[ExampleId(example)]
        for s in range(cfg.n_sims):
            seed = cfg.base_seed + s
            ds = generate_dataset(example, phi_true, J=cfg.J, n_s=cfg.n_s,
                                  n0=cfg.n0, nsr=cfg.nsr_list[0], seed=seed)
            path = os.path.join(cfg.out_dir, f"{example}_sim{s:03d}.kop")
            save_dataset(ds, path)
            paths.append(path)
    return paths


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list:
    """Dispatch on the experiment kind and write the CSV/JSON artifacts."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    if cfg.experiment == "accuracy":
        rows = run_accuracy(cfg, jobs)
        write_runs_csv(os.path.join(cfg.out_dir, "accuracy.csv"), rows)
    elif cfg.experiment == "noise_convergence":
        rows = run_noise_convergence(cfg, jobs)
        write_runs_csv(os.path.join(cfg.out_dir, "noise_convergence.csv"), rows)
    elif cfg.experiment == "scalability":
        rows = run_scalability(cfg)
        write_runs_csv(os.path.join(cfg.out_dir, "scalability.csv"), rows)
    elif cfg.experiment == "single_solve":
        rows, table, report = run_single_solve(cfg)
        write_runs_csv(os.path.join(cfg.out_dir, "single_solve.csv"), rows)
        with open(os.path.join(cfg.out_dir, "estimator.csv"), "w",
                  newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "phi_hat", "phi_true"])
            for row in table:
                writer.writerow([repr(float(v)) for v in row])
        with open(os.path.join(cfg.out_dir, "report.json"), "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2)
    else:
        raise ConfigError(f"unknown experiment {cfg.experiment!r}")
    return rows
