"""Synthetic input sampling, data generation, and dataset serialization.

Inputs are finite random cosine series evaluated analytically on the y-grid:

* integral / nonlocal:  ``u(y) = sum_n X_n cos(2 pi n y)`` with independent
  ``X_n ~ N(0, (2 sigma_n)^2)``; the nonlocal family truncates the sample to
  ``[-0.5, 0.8]`` by an indicator so the data shares the jump-type roughness
  of its true kernel.
* aggregation:  ``u(y) = 1 + sum_n sigma_n zeta_n cos(2 pi n y)`` with
  i.i.d. random signs ``zeta_n`` and the decay weights rescaled so that
  ``sum_n n sigma_n = 0.9 < 1``, which keeps ``u`` a strictly positive
  density-like input.

Outputs are generated by composite 5-node Gauss-Legendre quadrature of
``integral phi(s) g[u](x_j, s) ds`` per s-cell, deliberately *not* the
Riemann sum the estimators use, so that inversion never sees its own
discretization. Noise is i.i.d. centered Gaussian with variance
``sigma^2 / dx`` per entry, with ``sigma = nsr * S * sqrt(dx)`` calibrated
against the signal strength ``S`` (the average output norm), so that ``nsr``
is the expected noise-to-signal ratio.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .grids import Grids, build_grids
from .operators import ExampleId, g_matrix, operator_spec

#: File-format magic for serialized datasets (version 1).
DATASET_MAGIC = b"KOPDATA1"

#: Support window applied to nonlocal-family inputs.
NONLOCAL_CUTOFF = (-0.5, 0.8)


def kernel_integral(s):
    """True kernel of the integral example, ``sin(2 pi s)``."""
    return np.sin(2.0 * np.pi * np.asarray(s, dtype=float))


def kernel_nonlocal(s):
    """True kernel of the nonlocal example, ``sin(4 pi s)`` cut to [0, 0.8]."""
    s = np.asarray(s, dtype=float)
    return np.sin(4.0 * np.pi * s) * (s <= 0.8)


def kernel_aggregation(s):
    """True kernel of the aggregation example, ``-2 sin^3(6 pi s)``."""
    return -2.0 * np.sin(6.0 * np.pi * np.asarray(s, dtype=float)) ** 3


TRUE_KERNELS = {
    ExampleId.INTEGRAL: kernel_integral,
    ExampleId.NONLOCAL: kernel_nonlocal,
    ExampleId.AGGREGATION: kernel_aggregation,
}


@dataclass
class InputSample:
    """One input function, represented by its cosine coefficients.

    ``values`` and ``derivative_values`` are tabulations on the y-grid;
    the coefficients allow exact evaluation anywhere (used by the
    quadrature-based data generator). ``coefficients[n-1]`` multiplies
    ``cos(2 pi n y)``.
    """

    example_id: ExampleId
    coefficients: np.ndarray
    values: np.ndarray = field(repr=False)
    derivative_values: np.ndarray | None = field(repr=False, default=None)
    cutoff_applied: bool = False
    constant: float = 0.0


def eval_input(sample: InputSample, y) -> np.ndarray:
    """Evaluate the input function analytically at arbitrary points."""
    y = np.asarray(y, dtype=float)
    n = np.arange(1, len(sample.coefficients) + 1)
    u = sample.constant + np.cos(
        2.0 * np.pi * y[..., None] * n
    ) @ np.asarray(sample.coefficients)
    if sample.cutoff_applied:
        lo, hi = NONLOCAL_CUTOFF
        u = u * ((y >= lo) & (y <= hi))
    return u


def eval_input_derivative(sample: InputSample, y) -> np.ndarray:
    """Evaluate the input's derivative analytically (no cutoff supported)."""
    if sample.cutoff_applied:
        raise ValueError("derivative of a cutoff input is not defined")
    y = np.asarray(y, dtype=float)
    n = np.arange(1, len(sample.coefficients) + 1)
    return -np.sin(2.0 * np.pi * y[..., None] * n) @ (
        2.0 * np.pi * n * np.asarray(sample.coefficients)
    )


def make_input(example_id: ExampleId | str, grids: Grids, coefficients,
               constant: float | None = None,
               apply_cutoff: bool | None = None) -> InputSample:
    """Build an InputSample from explicit cosine coefficients.

    Parameters
    ----------
    coefficients : array-like
        ``coefficients[n-1]`` multiplies ``cos(2 pi n y)``.
    constant : float, optional
        Constant offset; defaults to 1 for the aggregation family, else 0.
    apply_cutoff : bool, optional
        Truncate to the nonlocal support window; defaults to True for the
        nonlocal family, else False.
    """
    example_id = ExampleId(example_id)
    if constant is None:
        constant = 1.0 if example_id == ExampleId.AGGREGATION else 0.0
    if apply_cutoff is None:
        apply_cutoff = example_id == ExampleId.NONLOCAL
    sample = InputSample(
        example_id=example_id,
        coefficients=np.asarray(coefficients, dtype=float),
        values=np.empty(0),
        cutoff_applied=bool(apply_cutoff),
        constant=float(constant),
    )
    sample.values = eval_input(sample, grids.y)
    if operator_spec(example_id).requires_derivative:
        sample.derivative_values = eval_input_derivative(sample, grids.y)
    return sample


def _decay_weights(decay, n_u: int) -> np.ndarray:
    if callable(decay):
        return np.array([decay(n) for n in range(1, n_u + 1)], dtype=float)
    return np.asarray(decay, dtype=float)[:n_u]


def sample_input(example_id: ExampleId | str, grids: Grids,
                 rng: np.random.Generator, n_u: int = 25,
                 decay=lambda n: n ** -2.0, n_min: int = 1) -> InputSample:
    """Draw one random input function for the given operator family.

    For the integral/nonlocal families the coefficients are
    ``X_n ~ N(0, (2 sigma_n)^2)`` for ``n = n_min..n_u`` with
    ``sigma_n`` from ``decay``; for the aggregation family they are
    ``sigma_n zeta_n`` with i.i.d. signs and the weights rescaled so
    ``sum_n n sigma_n = 0.9``.

    The series includes the fundamental mode ``n = 1`` by default: the
    integral example's true kernel lives entirely at frequency 1, which the
    higher modes cannot probe. The default truncation ``n_u = 25`` keeps the
    normal-matrix spectrum decaying near polynomially over many decades, so
    fifty-odd Krylov iterations do not exhaust the searchable space; the
    weights beyond that are below 2e-3 and contribute nothing visible.
    """
    example_id = ExampleId(example_id)
    if n_u < 2:
        raise ValueError(f"n_u must be at least 2, got {n_u}")
    sigma_n = _decay_weights(decay, n_u)
    coeffs = np.zeros(n_u)
    if example_id == ExampleId.AGGREGATION:
        weighted = np.arange(1, n_u + 1) @ sigma_n
        if weighted <= 0:
            raise ValueError("decay weights must have a positive weighted sum")
        sigma_n = sigma_n * (0.9 / weighted)
        signs = 2.0 * rng.integers(0, 2, size=n_u) - 1.0
        coeffs[:] = sigma_n * signs
    else:
        lo = max(1, n_min)
        coeffs[lo - 1:] = 2.0 * sigma_n[lo - 1:] * rng.standard_normal(n_u - lo + 1)
    return make_input(example_id, grids, coeffs)


@dataclass
class Dataset:
    """One synthetic dataset: semi-discrete g-array plus noisy outputs.

    Rows of ``g``, ``f``, ``f_clean`` and ``noise`` are ordered k-major:
    row ``k*J + (j-1)`` belongs to input ``u_k`` at output point ``x_j``.
    This ordering is fixed and shared by every module.
    """

    example_id: ExampleId
    grids: Grids
    n0: int
    g: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    f_clean: np.ndarray = field(repr=False)
    noise: np.ndarray = field(repr=False)
    sigma: float = 0.0
    nsr: float = 0.0
    seed: int = 0


def _quadrature_nodes(grids: Grids, points_per_cell: int = 5):
    """Gauss-Legendre nodes/weights on every s-cell, flattened."""
    t, w = leggauss(points_per_cell)
    left = grids.s - grids.ds
    nodes = left[:, None] + 0.5 * grids.ds * (t[None, :] + 1.0)
    weights = np.broadcast_to(0.5 * grids.ds * w, nodes.shape)
    return nodes.ravel(), weights.ravel()


def _g_at_quadrature(sample: InputSample, grids: Grids, s_nodes: np.ndarray) -> np.ndarray:
    """Evaluate ``g[u](x_j, s_q)`` analytically at off-grid s points."""
    x = grids.x[:, None]
    sq = s_nodes[None, :]
    if sample.example_id == ExampleId.INTEGRAL:
        return eval_input(sample, x - sq)
    if sample.example_id == ExampleId.NONLOCAL:
        return (eval_input(sample, x + sq) + eval_input(sample, x - sq)
                - 2.0 * eval_input(sample, x))
    u_m, u_p = eval_input(sample, x - sq), eval_input(sample, x + sq)
    d_m, d_p = eval_input_derivative(sample, x - sq), eval_input_derivative(sample, x + sq)
    u_c = eval_input(sample, np.broadcast_to(x, u_m.shape))
    d_c = eval_input_derivative(sample, np.broadcast_to(x, u_m.shape))
    return d_m * u_c + u_m * d_c - (d_p * u_c + u_p * d_c)


def generate_dataset(example_id: ExampleId | str, phi_true, J: int,
                     n_s: int | None = None, n0: int = 30, nsr: float = 0.1,
                     seed: int = 0, n_u: int = 25,
                     decay=lambda n: n ** -2.0) -> Dataset:
    """Generate a full synthetic dataset for one operator family.

    ``f_clean`` comes from 5-node composite Gauss-Legendre quadrature of the
    operator against analytically evaluated inputs; the stored ``g`` matrix
    holds values at the s-grid nodes only. The noise scale is calibrated as
    ``sigma = nsr * S * sqrt(dx)`` where ``S`` is the mean output norm, so
    the expected noise norm per input is ``nsr * S``.

    Identical ``seed`` gives a bit-identical dataset; the noise stream is
    drawn before scaling, so datasets at different ``nsr`` share inputs.
    """
    if nsr < 0:
        raise ValueError(f"nsr must be nonnegative, got {nsr}")
    example_id = ExampleId(example_id)
    grids = build_grids(J, n_s)
    rng = np.random.default_rng(seed)
    s_nodes, s_weights = _quadrature_nodes(grids)
    phi_q = np.asarray(phi_true(s_nodes), dtype=float)
    if phi_q.shape != s_nodes.shape or not np.all(np.isfinite(phi_q)):
        raise ValueError("phi_true could not be evaluated on [0, 1]")

    g_rows, f_rows = [], []
    for _ in range(n0):
        sample = sample_input(example_id, grids, rng, n_u=n_u, decay=decay)
        g_rows.append(g_matrix(example_id, grids, sample.values,
                               sample.derivative_values))
        f_rows.append(_g_at_quadrature(sample, grids, s_nodes) @ (s_weights * phi_q))
    g = np.vstack(g_rows)
    f_clean = np.concatenate(f_rows)

    per_input = f_clean.reshape(n0, grids.J)
    signal = np.mean(np.sqrt(np.mean(per_input ** 2, axis=1)))
    sigma = nsr * signal * np.sqrt(grids.dx)
    noise = (sigma / np.sqrt(grids.dx)) * rng.standard_normal(n0 * grids.J)
    return Dataset(example_id=example_id, grids=grids, n0=n0, g=g,
                   f=f_clean + noise, f_clean=f_clean, noise=noise,
                   sigma=float(sigma), nsr=float(nsr), seed=int(seed))


def save_dataset(dataset: Dataset, path) -> None:
    """Write a dataset to ``path`` in the versioned binary format."""
    buf = io.BytesIO()
    np.savez(
        buf,
        example_id=str(dataset.example_id.value),
        J=dataset.grids.J,
        n_s=dataset.grids.n_s,
        n0=dataset.n0,
        g=dataset.g,
        f=dataset.f,
        f_clean=dataset.f_clean,
        noise=dataset.noise,
        sigma=dataset.sigma,
        nsr=dataset.nsr,
        seed=dataset.seed,
    )
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC)
        fh.write(buf.getvalue())


def load_dataset(path) -> Dataset:
    """Read a dataset written by :func:`save_dataset`."""
    with open(path, "rb") as fh:
        magic = fh.read(len(DATASET_MAGIC))
        if magic != DATASET_MAGIC:
            raise ValueError(f"{path}: not a {DATASET_MAGIC.decode()} file")
        payload = np.load(io.BytesIO(fh.read()))
    grids = build_grids(int(payload["J"]), int(payload["n_s"]))
    return Dataset(
        example_id=ExampleId(str(payload["example_id"])),
        grids=grids,
        n0=int(payload["n0"]),
        g=payload["g"],
        f=payload["f"],
        f_clean=payload["f_clean"],
        noise=payload["noise"],
        sigma=float(payload["sigma"]),
        nsr=float(payload["nsr"]),
        seed=int(payload["seed"]),
    )
