"""The bivariate functionals ``g[u](x, s)`` and the Riemann-sum forward map.

Three operator families are supported, each reducing to the common form

    R_phi[u](x) = integral_0^1 phi(s) g[u](x, s) ds

with a family-specific ``g``:

* integral:     ``g[u](x, s) = u(x - s)``
* nonlocal:     ``g[u](x, s) = u(x + s) + u(x - s) - 2 u(x)``
* aggregation:  ``g[u](x, s) = d/dx[u(x - s) u(x)] - d/dx[u(x + s) u(x)]``

On the estimator side the s-integral is approximated by the right-endpoint
Riemann sum on the cells ``I_l = (s_{l-1}, s_l]``, which matches the
piecewise-constant representation of the kernel on those cells.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .grids import Grids


class ExampleId(str, Enum):
    """The three operator families."""

    INTEGRAL = "integral"
    NONLOCAL = "nonlocal"
    AGGREGATION = "aggregation"


@dataclass(frozen=True)
class OperatorSpec:
    """Static description of one operator family."""

    example_id: ExampleId
    requires_derivative: bool


_SPECS = {
    ExampleId.INTEGRAL: OperatorSpec(ExampleId.INTEGRAL, requires_derivative=False),
    ExampleId.NONLOCAL: OperatorSpec(ExampleId.NONLOCAL, requires_derivative=False),
    ExampleId.AGGREGATION: OperatorSpec(ExampleId.AGGREGATION, requires_derivative=True),
}


def operator_spec(example_id: ExampleId | str) -> OperatorSpec:
    """Return the static description of one operator family."""
    return _SPECS[ExampleId(example_id)]


def _combine(example_id: ExampleId, u_m, u_p, u_c, d_m=None, d_p=None, d_c=None):
    """Combine input values at ``x-s`` (m), ``x+s`` (p) and ``x`` (c)."""
    if example_id == ExampleId.INTEGRAL:
        return u_m
    if example_id == ExampleId.NONLOCAL:
        return u_p + u_m - 2.0 * u_c
    if example_id == ExampleId.AGGREGATION:
        # d/dx[u(x-s)u(x)] - d/dx[u(x+s)u(x)], expanded by the product rule
        return d_m * u_c + u_m * d_c - (d_p * u_c + u_p * d_c)
    raise ValueError(f"unknown example id {example_id!r}")


def eval_g(spec: OperatorSpec, sample, grids: Grids, x: float, s: float) -> float:
    """Evaluate ``g[u](x, s)`` for on-grid ``x`` and ``s`` by index lookups.

    ``sample`` must expose ``values`` (u on the y-grid) and, for the
    aggregation operator, ``derivative_values``. Both ``x`` and ``s`` must be
    mesh nodes; out-of-range ``x +- s`` cannot occur for valid grids.
    """
    J = grids.J
    j = int(round(x * J))
    m = int(round(s * J))
    if abs(x - j / J) > 1e-12 * max(1.0, J) or not 1 <= j <= J:
        raise ValueError(f"x={x} is not on the x-grid with J={J}")
    if abs(s - m / J) > 1e-12 * max(1.0, J) or m % grids.stride or not 1 <= m <= J:
        raise ValueError(f"s={s} is not on the s-grid with n_s={grids.n_s}")
    u = np.asarray(sample.values)
    im, ip, ic = J + j - m, J + j + m, J + j
    if spec.example_id == ExampleId.INTEGRAL:
        return float(u[im])
    if spec.example_id == ExampleId.NONLOCAL:
        return float(u[ip] + u[im] - 2.0 * u[ic])
    d = np.asarray(sample.derivative_values)
    return float(_combine(spec.example_id, u[im], u[ip], u[ic], d[im], d[ip], d[ic]))


def g_matrix(example_id: ExampleId | str, grids: Grids, values: np.ndarray,
             derivative_values: np.ndarray | None = None) -> np.ndarray:
    """Tabulate ``g[u](x_j, s_l)`` on the full grid as a (J, n_s) array.

    ``values`` (and ``derivative_values`` for the aggregation operator) are
    the input evaluated on the y-grid; all lookups are exact index
    arithmetic.
    """
    example_id = ExampleId(example_id)
    spec = operator_spec(example_id)
    J, stride = grids.J, grids.stride
    u = np.asarray(values, dtype=float)
    if u.shape != grids.y.shape:
        raise ValueError(f"values has shape {u.shape}, expected {grids.y.shape}")
    j_units = np.arange(1, J + 1)[:, None]
    m_units = (stride * np.arange(1, grids.n_s + 1))[None, :]
    im = J + j_units - m_units
    if spec.example_id == ExampleId.INTEGRAL:
        return u[im]
    ip = J + j_units + m_units
    ic = J + j_units + np.zeros_like(m_units)
    if spec.example_id == ExampleId.NONLOCAL:
        return u[ip] + u[im] - 2.0 * u[ic]
    if derivative_values is None:
        raise ValueError("aggregation operator requires derivative_values")
    d = np.asarray(derivative_values, dtype=float)
    return _combine(spec.example_id, u[im], u[ip], u[ic], d[im], d[ip], d[ic])


def forward_riemann(g: np.ndarray, phi_values: np.ndarray) -> np.ndarray:
    """Apply the right-endpoint Riemann-sum forward map ``g @ phi * ds``.

    Parameters
    ----------
    g : (n_rows, n_s) ndarray
        Tabulated ``g[u_k](x_j, s_l)`` values, rows in k-major order.
    phi_values : (n_s,) ndarray
        Kernel values at the cell nodes ``s_l``.

    Returns
    -------
    (n_rows,) ndarray of ``sum_l g(., s_l) phi(s_l) ds``.
    """
    g = np.asarray(g, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)
    if g.ndim != 2 or phi_values.ndim != 1 or g.shape[1] != phi_values.shape[0]:
        raise ValueError(
            f"dimension mismatch: g is {g.shape}, phi_values is {phi_values.shape}"
        )
    return g @ phi_values / g.shape[1]
