"""Comparison regularizers: Gaussian-kernel RKHS norm and weighted L2 norm.

The Gaussian baseline swaps the data-adaptive reproducing kernel for a
preselected one, ``K(s, s') = exp(-|s - s'|^2 / (2 sigma0^2))``, and builds
the same shaped objects (``xi_K = g K ds``, ``Sigma_K = g K g^T ds^2``), so
every solver written for the adaptive system runs on it unchanged.

The weighted-L2 baseline estimates the cell values directly: it minimizes
``(1/n)||A c - f||^2 + lam ||c||_B^2`` with ``A = g ds`` and
``B = diag(rho)``. The substitution ``ct = B^{1/2} c``, ``At = A B^{-1/2}``
(columns of ``A`` scaled by ``rho^{-1/2}``) turns the penalty into a plain
2-norm, solved either through the SVD of ``At`` (with the same L-curve/GCV
grids as the direct solvers) or by standard 2-norm bidiagonalization with
the same early-stopping rules. Cells the data never explores (``rho = 0``)
are dropped; the estimate is zero there.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .adaptive import Estimate, SolverReport, build_exploration_measure
from .direct import DEFAULT_TOL, _curvature_log
from .krylov import (DiscrepancyStop, LCurveStop, find_omega,
                     menger_curvatures, wgcv_lambda)


@dataclass
class GaussianSystem:
    """Preselected Gaussian-kernel system, solver-compatible with the
    adaptive one (same ``Sigma``/``xi``/``f`` surface)."""

    sigma0: float
    K: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    Sigma: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    ds: float = 0.0


def assemble_gaussian(g: np.ndarray, f: np.ndarray,
                      sigma0: float = 0.1) -> GaussianSystem:
    """Assemble the Gaussian-kernel system on the s-grid."""
    if sigma0 <= 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    g = np.asarray(g, dtype=float)
    f = np.asarray(f, dtype=float)
    n_s = g.shape[1]
    ds = 1.0 / n_s
    s = np.arange(1, n_s + 1) / n_s
    diff = s[:, None] - s[None, :]
    K = np.exp(-diff ** 2 / (2.0 * sigma0 ** 2))
    xi = g @ K * ds
    Sigma = g @ K @ g.T * ds ** 2
    Sigma = 0.5 * (Sigma + Sigma.T)
    return GaussianSystem(sigma0=float(sigma0), K=K, xi=xi, Sigma=Sigma,
                          f=f.copy(), ds=ds)


@dataclass
class L2RhoSystem:
    """Weighted-L2 problem after dropping unexplored cells."""

    A: np.ndarray = field(repr=False)            # g * ds, all n_s columns
    rho: np.ndarray = field(repr=False)
    mask: np.ndarray = field(repr=False)         # cells with rho > 0
    B_half_inv: np.ndarray = field(repr=False)   # rho^{-1/2} on kept cells
    A_tilde: np.ndarray = field(repr=False)      # column-scaled, kept cells
    f: np.ndarray = field(repr=False)
    ds: float = 0.0

    @property
    def n_s(self) -> int:
        return self.A.shape[1]


def assemble_l2rho(g: np.ndarray, f: np.ndarray) -> L2RhoSystem:
    """Assemble the weighted-L2 system; raises on degenerate data."""
    g = np.asarray(g, dtype=float)
    f = np.asarray(f, dtype=float)
    n_s = g.shape[1]
    ds = 1.0 / n_s
    rho = build_exploration_measure(g)
    mask = rho > 0
    A = g * ds
    B_half_inv = 1.0 / np.sqrt(rho[mask])
    A_tilde = A[:, mask] * B_half_inv[None, :]
    return L2RhoSystem(A=A, rho=rho, mask=mask, B_half_inv=B_half_inv,
                       A_tilde=A_tilde, f=f.copy(), ds=ds)


def _expand(system: L2RhoSystem, c_masked: np.ndarray) -> np.ndarray:
    c = np.zeros(system.n_s)
    c[system.mask] = c_masked
    return c


def _l2rho_direct(system: L2RhoSystem, selector: str, n_grid: int,
                  tol: float) -> tuple[np.ndarray, SolverReport]:
    """SVD path: Tikhonov in the transformed 2-norm problem."""
    At, f = system.A_tilde, system.f
    n = f.shape[0]
    U, svals, Vt = np.linalg.svd(At, full_matrices=False)
    s2 = svals ** 2
    r = int(np.count_nonzero(s2 > tol))
    if r < (2 if selector == "lcurve" else 1):
        raise ValueError("transformed system has too small a numerical rank")
    b = U.T @ f
    br, s2r, sr = b[:r], s2[:r], svals[:r]
    tail2 = float(f @ f - b[:r] @ b[:r])
    grid = np.geomspace(s2r[r - 1], s2r[0], n_grid)
    nl = n * grid[:, None]
    resid = np.sqrt(((nl / (s2r + nl)) ** 2) @ br ** 2 + max(tail2, 0.0))
    cnorm = np.sqrt(((sr / (s2r + nl)) ** 2) @ br ** 2)
    flags = []
    if selector == "lcurve":
        tiny = np.finfo(float).tiny
        x, y = np.log(np.maximum(resid, tiny)), np.log(np.maximum(cnorm, tiny))
        kappa = _curvature_log(x, y, np.log(grid))
        best = int(np.argmax(kappa))
        if kappa[best] <= 0:
            flags.append("no_corner")
        method = "TikhonovLC"
    else:
        gcv = (resid ** 2) / (n - r + (nl / (s2r + nl)).sum(axis=1)) ** 2
        best = int(np.argmin(gcv))
        method = "TikhonovGCV"
    lam = float(grid[best])
    ct = Vt[:r].T @ (sr * br / (s2r + n * lam))
    report = SolverReport(
        method=method, lambda_=lam,
        residual_history=[float(np.linalg.norm(At @ ct - f))],
        solution_norm_history=[float(np.linalg.norm(ct))],
        flags=flags,
    )
    return ct, report


def _rect_gkb(A: np.ndarray, f: np.ndarray, l_max: int):
    """Standard 2-norm bidiagonalization of a rectangular matrix.

    Full reorthogonalization on both families; returns the basis ``V``, the
    recursion scalars, and per-iterate (residual, solution-norm) histories
    from the Givens recurrence.
    """
    m, n = A.shape
    beta1 = float(np.linalg.norm(f))
    scale = float(np.linalg.norm(A, ord="fro"))
    tol_break = 1e-13 * scale ** 2
    U = np.zeros((m, l_max + 2))
    V = np.zeros((n, l_max + 2))
    alphas: list[float] = []
    betas: list[float] = [beta1]
    rhos: list[float] = []
    thetas: list[float] = []
    phis: list[float] = []
    res_hist: list[float] = []
    norm_hist: list[float] = []
    if beta1 == 0.0 or scale == 0.0:
        return V, alphas, betas, rhos, thetas, phis, res_hist, norm_hist, 0
    U[:, 0] = f / beta1
    v = A.T @ U[:, 0]
    alpha = float(np.linalg.norm(v))
    if alpha == 0.0:
        return V, alphas, betas, rhos, thetas, phis, res_hist, norm_hist, 0
    V[:, 0] = v / alpha
    alphas.append(alpha)
    rho_bar, phi_bar = alpha, beta1
    l = 0
    for i in range(1, l_max + 1):
        r = A @ V[:, i - 1] - alphas[i - 1] * U[:, i - 1]
        for _ in range(2):
            r -= U[:, :i] @ (U[:, :i].T @ r)
        beta = float(np.linalg.norm(r))
        betas.append(beta)
        rho = float(np.hypot(rho_bar, beta))
        cbar, sbar = rho_bar / rho, beta / rho
        phi = cbar * phi_bar
        phi_bar = sbar * phi_bar
        rhos.append(rho)
        phis.append(phi)
        l = i
        # solution norm via back-substitution of the rotated factor
        y = np.zeros(l)
        y[l - 1] = phis[l - 1] / rhos[l - 1]
        for j in range(l - 2, -1, -1):
            y[j] = (phis[j] - thetas[j] * y[j + 1]) / rhos[j]
        res_hist.append(abs(phi_bar))
        norm_hist.append(float(np.linalg.norm(y)))
        if beta <= tol_break / max(scale, 1.0):
            break
        U[:, i] = r / beta
        s = A.T @ U[:, i] - beta * V[:, i - 1]
        for _ in range(2):
            s -= V[:, :i] @ (V[:, :i].T @ s)
        alpha = float(np.linalg.norm(s))
        if alpha * beta <= tol_break:
            break
        alphas.append(alpha)
        V[:, i] = s / alpha
        theta = sbar * alpha
        rho_bar = -cbar * alpha
        thetas.append(theta)
    return V, alphas, betas, rhos, thetas, phis, res_hist, norm_hist, l


def _backsolve(rhos, thetas, phis, l):
    y = np.zeros(l)
    if l == 0:
        return y
    y[l - 1] = phis[l - 1] / rhos[l - 1]
    for j in range(l - 2, -1, -1):
        y[j] = (phis[j] - thetas[j] * y[j + 1]) / rhos[j]
    return y


def _l2rho_iterative(system: L2RhoSystem, stop, l_max: int):
    At, f = system.A_tilde, system.f
    (V, alphas, betas, rhos, thetas, phis,
     res_hist, norm_hist, l_run) = _rect_gkb(At, f, l_max)
    flags: list[str] = []
    chosen = None
    if isinstance(stop, DiscrepancyStop):
        if stop.noise_norm is None:
            raise ValueError("discrepancy principle requires noise_norm")
        method = "IterativeDP"
        hits = [i + 1 for i, rv in enumerate(res_hist)
                if rv <= stop.tau * stop.noise_norm]
        chosen = hits[0] if hits else None
    elif isinstance(stop, LCurveStop):
        method = "IterativeLC"
        if l_run >= 3:
            tiny = np.finfo(float).tiny
            pts = np.column_stack([
                np.log(np.maximum(res_hist, tiny)),
                np.log(np.maximum(norm_hist, tiny)),
            ])
            curv = menger_curvatures(pts)
            if curv.max() > 0:
                chosen = int(np.argmax(curv)) + 1
            else:
                flags.append("no_corner")
    else:
        raise TypeError(f"unknown stopping rule {stop!r}")
    if chosen is None:
        flags.append("no_stop")
        chosen = l_run
    y = _backsolve(rhos, thetas, phis, chosen)
    ct = V[:, :chosen] @ y
    if not res_hist:
        res_hist, norm_hist = [float(np.linalg.norm(f))], [0.0]
    report = SolverReport(method=method, stop_iteration=chosen,
                          residual_history=res_hist,
                          solution_norm_history=norm_hist, flags=flags)
    return ct, report


def _l2rho_hybrid(system: L2RhoSystem, l_max: int):
    At, f = system.A_tilde, system.f
    n = f.shape[0]
    beta1 = float(np.linalg.norm(f))
    (V, alphas, betas, rhos, thetas, phis,
     res_hist, norm_hist, l_run) = _rect_gkb(At, f, l_max)
    if l_run == 0:
        return np.zeros(At.shape[1]), SolverReport(
            method="Hybrid", lambda_=0.0, stop_iteration=0,
            residual_history=[beta1], solution_norm_history=[0.0],
            flags=["degenerate"])
    omega_hats: list[float] = []
    reg_res_hist: list[float] = []
    reg_norm_hist: list[float] = []
    y = np.zeros(0)
    mu = 0.0
    prev_ct = None
    stable = 0
    final_l = l_run
    for l in range(1, l_run + 1):
        B = np.zeros((l + 1, l))
        B[np.arange(l), np.arange(l)] = alphas[:l]
        B[np.arange(1, l + 1), np.arange(l)] = betas[1:l + 1]
        U, svals, Vt = np.linalg.svd(B, full_matrices=False)
        bhat = beta1 * U[0, :]
        tail2 = max(beta1 ** 2 - float(bhat @ bhat), 0.0)
        omega_hats.append(1.0 if l == 1 else find_omega(svals, bhat, tail2, l + 1))
        omega = float(np.mean(omega_hats))
        mu = wgcv_lambda(svals, bhat, tail2, l + 1, omega)
        y = Vt.T @ ((svals / (svals ** 2 + mu)) * bhat)
        reg_res = float(np.sqrt(np.sum(((mu / (svals ** 2 + mu)) * bhat) ** 2)
                                + tail2))
        reg_res_hist.append(reg_res)
        reg_norm_hist.append(float(np.linalg.norm(y)))
        final_l = l
        ct_now = V[:, :l] @ y
        if prev_ct is not None and np.linalg.norm(ct_now - prev_ct) <= \
                1e-6 * max(np.linalg.norm(ct_now), 1e-300):
            stable += 1
            if stable >= 5:
                break
        else:
            stable = 0
        prev_ct = ct_now
    ct = V[:, :final_l] @ y
    report = SolverReport(method="Hybrid", lambda_=mu / n,
                          stop_iteration=final_l,
                          residual_history=reg_res_hist,
                          solution_norm_history=reg_norm_hist)
    return ct, report


def solve_l2rho(system: L2RhoSystem, method: str = "TikhonovLC",
                n_grid: int = 200, tol: float = DEFAULT_TOL,
                l_max: int = 100, noise_norm: float | None = None,
                tau: float = 1.01, window: int = 10,
                lam: float | None = None) -> Estimate:
    """Solve the weighted-L2 problem with the requested method.

    ``method`` mirrors the RKHS solvers: TikhonovLC, TikhonovGCV,
    IterativeLC, IterativeDP, Hybrid, or Tikhonov with an explicit ``lam``.
    Returns an Estimate whose ``coefficients`` (= ``phi_values``) are the
    kernel cell values, zero on unexplored cells.
    """
    start = time.perf_counter()
    if method in ("TikhonovLC", "TikhonovGCV"):
        selector = "lcurve" if method == "TikhonovLC" else "gcv"
        ct, report = _l2rho_direct(system, selector, n_grid, tol)
    elif method == "Tikhonov":
        if lam is None or lam < 0:
            raise ValueError("explicit Tikhonov needs lam >= 0")
        At = system.A_tilde
        n = system.f.shape[0]
        U, svals, Vt = np.linalg.svd(At, full_matrices=False)
        b = U.T @ system.f
        if lam == 0:
            # pseudo-inverse limit: truncate the numerical rank
            with np.errstate(divide="ignore"):
                filt = np.where(svals ** 2 > tol, 1.0 / svals, 0.0)
        else:
            # the B-weighted ridge regularizes the whole space: no cutoff
            filt = svals / (svals ** 2 + n * lam)
        ct = Vt.T @ (filt * b)
        report = SolverReport(method="Tikhonov", lambda_=float(lam))
    elif method == "IterativeLC":
        ct, report = _l2rho_iterative(system, LCurveStop(window=window), l_max)
    elif method == "IterativeDP":
        ct, report = _l2rho_iterative(
            system, DiscrepancyStop(noise_norm=noise_norm, tau=tau), l_max)
    elif method == "Hybrid":
        ct, report = _l2rho_hybrid(system, l_max)
    else:
        raise ValueError(f"unknown method {method!r}")
    c = _expand(system, system.B_half_inv * ct)
    report.wall_time_seconds = time.perf_counter() - start
    return Estimate(coefficients=c, phi_values=c, norm_kind="L2rho",
                    solver_kind=report.method, report=report)
