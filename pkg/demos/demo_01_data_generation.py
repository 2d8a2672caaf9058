"""Walkthrough: meshes, random inputs, and synthetic datasets.

Run:  python demos/demo_01_data_generation.py
"""

import numpy as np

from kernelop import (TRUE_KERNELS, build_grids, generate_dataset,
                      sample_input, save_dataset)

# The geometry is fixed by one integer J: outputs on {j/J} in (0, 1],
# inputs tabulated on [-1, 2] with the same spacing, kernel cells of
# length 1/n_s. J divisible by n_s keeps everything on-grid.
grids = build_grids(J=50)
print(f"x: {grids.J} points, dx={grids.dx}")
print(f"y: {len(grids.y)} points covering [{grids.y[0]}, {grids.y[-1]}]")
print(f"s: {grids.n_s} cells, ds={grids.ds}")

# Random inputs are finite cosine series, drawn fresh per simulation.
rng = np.random.default_rng(0)
for example in ("integral", "nonlocal", "aggregation"):
    u = sample_input(example, grids, rng)
    print(f"\n{example}: coefficients {np.round(u.coefficients, 4)}")
    print(f"  u range on the grid: [{u.values.min():.3f}, {u.values.max():.3f}]"
          f"  cutoff={u.cutoff_applied}")

# A dataset packages the tabulated g-array with noisy outputs. The clean
# outputs come from per-cell Gauss-Legendre quadrature (5 nodes), while the
# estimators later use the plain Riemann sum: the inversion never sees the
# quadrature that made its data.
ds = generate_dataset("integral", TRUE_KERNELS["integral"], J=50, n0=5,
                      nsr=0.1, seed=42)
print(f"\ndataset: g {ds.g.shape}, f {ds.f.shape}, sigma={ds.sigma:.4g}")
print(f"noise-to-signal check: ||noise|| / ||f_clean|| = "
      f"{np.linalg.norm(ds.noise) / np.linalg.norm(ds.f_clean):.3f}")

save_dataset(ds, "/tmp/kernelop_demo.kop")
print("saved to /tmp/kernelop_demo.kop (magic header KOPDATA1)")
