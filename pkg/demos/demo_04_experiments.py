"""Walkthrough: the experiment harness at desk scale.

Runs a miniature version of each experiment family and prints the grouped
statistics. The full-size settings live in the configs under demos/configs
and run through the CLI, e.g.

    kernelop experiment --config demos/configs/accuracy_small.json --jobs 2

Run:  python demos/demo_04_experiments.py
"""

from kernelop.experiments import (ExperimentConfig, run_accuracy,
                                  run_noise_convergence, run_single_solve)
from kernelop import summarize

base = dict(J=32, n0=6, n_sims=8, l_max=25, base_seed=0,
            examples=["integral"], norms=["HGbar", "HGauss", "L2rho"],
            solvers=["TikhonovLC", "Hybrid"])

# accuracy: box-plot material per (norm, solver)
cfg = ExperimentConfig(**base).validate()
rows = run_accuracy(cfg, jobs=1)
print("accuracy medians over", cfg.n_sims, "simulations:")
for (norm, solver), box in sorted(summarize(rows).items()):
    print(f"  {norm:7s} {solver:11s} median={box['median']:.4f} "
          f"IQR=[{box['q1']:.4f}, {box['q3']:.4f}]")

# noise sweep: medians should decrease as the noise shrinks
cfg = ExperimentConfig(**{**base, "experiment": "noise_convergence",
                          "norms": ["HGbar"], "n_sims": 4}).validate()
rows = run_noise_convergence(cfg, jobs=1)
print("\nnoise sweep (median rel. error per nsr):")
for solver in ("TikhonovLC", "Hybrid", "IterOpt"):
    by_nsr = {}
    for r in rows:
        if r.solver == solver:
            by_nsr.setdefault(r.nsr, []).append(r.rel_error)
    line = "  ".join(f"{nsr:g}:{sorted(v)[len(v)//2]:.3f}"
                     for nsr, v in sorted(by_nsr.items(), reverse=True))
    print(f"  {solver:11s} {line}")

# single solve: the (s, phi_hat, phi_true) table used by the plot tool
cfg = ExperimentConfig(**{**base, "experiment": "single_solve",
                          "out_dir": "/tmp/kernelop_demo_out"}).validate()
rows, table, report = run_single_solve(cfg)
print(f"\nsingle solve: rel_error={rows[0].rel_error:.4f}, "
      f"estimator table {table.shape} (s, phi_hat, phi_true)")
