"""Uniform meshes shared by data generation, assembly, and solvers.

The geometry is fixed: outputs live on the x-mesh ``{j/J, j=1..J}`` of
``(0, 1]``, inputs are tabulated on the y-mesh covering ``[-1, 2]`` with the
same spacing ``1/J`` (both endpoints included), and the kernel variable uses
the s-mesh ``{l/n_s, l=1..n_s}`` whose cells are ``I_l = (s_{l-1}, s_l]``.
Requiring ``J % n_s == 0`` makes every ``x_j +- s_l`` land exactly on a
y-node, so all evaluations reduce to index arithmetic (no interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Grids:
    """Uniform x-, y-, and s-meshes for one problem size.

    Attributes
    ----------
    J : int
        Number of x points; the mesh size is ``dx = 1/J``.
    n_s : int
        Number of s points; the cell length is ``ds = 1/n_s``.
    x : (J,) ndarray
        Output mesh ``j/J, j=1..J``.
    y : (3J+1,) ndarray
        Input mesh, uniform on ``[-1, 2]`` with spacing ``dx``, endpoints
        included.
    s : (n_s,) ndarray
        Kernel mesh ``l/n_s, l=1..n_s`` (right endpoints of the cells).
    """

    J: int
    n_s: int
    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return 1.0 / self.J

    @property
    def ds(self) -> float:
        return 1.0 / self.n_s

    @property
    def stride(self) -> int:
        """Number of x-mesh steps per s-mesh step, ``J // n_s``."""
        return self.J // self.n_s

    def y_index(self, value_in_dx_units: np.ndarray | int) -> np.ndarray | int:
        """Index into ``y`` of the node at ``value_in_dx_units / J``.

        ``y[i] = (i - J)/J``, so a point ``m/J`` sits at index ``J + m``.
        """
        return self.J + value_in_dx_units


def build_grids(J: int, n_s: int | None = None) -> Grids:
    """Build the uniform meshes for problem size ``(J, n_s)``.

    Parameters
    ----------
    J : int
        Number of x points, at least 2.
    n_s : int, optional
        Number of s points; defaults to ``J``. Must divide ``J`` so that
        ``x_j - s_l`` is always a y-node.

    Returns
    -------
    Grids
    """
    if J < 2:
        raise ValueError(f"J must be at least 2, got {J}")
    if n_s is None:
        n_s = J
    if not 1 <= n_s <= J:
        raise ValueError(f"n_s must be in [1, J]={J}, got {n_s}")
    if J % n_s != 0:
        raise ValueError(
            f"J={J} must be divisible by n_s={n_s}: otherwise x_j - s_l "
            "falls between y-nodes and would require interpolation"
        )
    x = np.arange(1, J + 1) / J
    y = np.arange(-J, 2 * J + 1) / J
    s = np.arange(1, n_s + 1) / n_s
    return Grids(J=J, n_s=n_s, x=x, y=y, s=s)
