"""Iterative and hybrid regularization by Golub-Kahan bidiagonalization.

The normal matrix ``Sigma`` defines the operator ``x -> Sigma x`` from the
``Sigma``-inner-product space to the Euclidean one, whose adjoint is the
identity on ``range(Sigma)``. Bidiagonalizing that pair gives the coupled
recursions (with ``q_0 = 0`` and ``fbar`` the projection of ``f`` onto
``range(Sigma)``):

    beta_1 p_1 = fbar
    alpha_i q_i = p_i - beta_i q_{i-1}           (alpha from the Sigma-norm)
    beta_{i+1} p_{i+1} = Sigma q_i - alpha_i p_i (beta from the 2-norm)

The ``q_i`` are Sigma-orthonormal, the ``p_i`` 2-orthonormal, and after
``l`` steps ``Sigma Q_l = P_{l+1} B_l`` with the lower-bidiagonal ``B_l``
holding the alphas/betas. The iterate ``c_l`` minimizing
``||Sigma c - fbar||_2`` over the growing Krylov subspace is updated in
O(n) per step through the Givens-QR (LSQR) recurrence; the residual norm
decreases and the solution Sigma-norm increases monotonically, so early
stopping regularizes.

Both orthonormal families are fully reorthogonalized (the q's in the
Sigma-inner product, using the cached products ``Z = Sigma Q``): the
datasets here are desk scale and orthogonality loss would otherwise corrupt
the discrete L-curve.

Stopping rules: the discrepancy principle halts at the first iterate whose
residual drops below ``tau * ||noise||``; the discrete L-curve runs a
window of extra iterations past the best corner candidate, found by maximum
Menger curvature over consecutive log-log triples of (residual norm,
solution Sigma-norm). The hybrid method re-solves the small projected
problem with a Tikhonov term at every step, re-selecting the parameter by
weighted GCV, which stabilizes the convergence of the pure iteration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import lsqr

from .adaptive import Estimate, SolverReport, eval_estimate

#: Breakdown threshold for alpha*beta, relative to the spectral norm.
BREAKDOWN_RTOL = 1e-13


@dataclass
class DiscrepancyStop:
    """Stop once ``||Sigma c_l - f|| <= tau * noise_norm``."""

    noise_norm: float | None = None
    tau: float = 1.01


@dataclass
class LCurveStop:
    """Stop ``window`` iterations past the current L-curve corner."""

    window: int = 10


@dataclass
class GkbState:
    """State of one bidiagonalization run.

    ``P[:, :l+1]`` and ``Q[:, :l]`` hold the 2- and Sigma-orthonormal bases
    after ``l`` completed steps (one fewer P column if the run terminated by
    breakdown); ``Z`` caches ``Sigma @ Q``. The Givens scalars, the
    incremental coefficient vector ``c`` and direction ``w`` follow the
    LSQR recurrence. ``rhos/thetas/phis`` are the rotated upper-bidiagonal
    factor and right-hand side, kept so any iterate ``y_l`` can be recovered
    by back-substitution.
    """

    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    Z: np.ndarray = field(repr=False)
    p_count: int = 0
    q_count: int = 0
    alphas: list = field(default_factory=list)
    betas: list = field(default_factory=list)
    rho_bar: float = 0.0
    phi_bar: float = 0.0
    cbar: float = 0.0
    sbar: float = 0.0
    c: np.ndarray = field(repr=False, default=None)
    w: np.ndarray = field(repr=False, default=None)
    l: int = 0
    terminated: bool = False
    null_norm: float = 0.0
    lambda_max: float = 0.0
    beta1: float = 0.0
    rhos: list = field(default_factory=list)
    thetas: list = field(default_factory=list)
    phis: list = field(default_factory=list)
    residual_history: list = field(default_factory=list)
    solution_norm_history: list = field(default_factory=list)


def estimate_lambda_max(Sigma: np.ndarray, iters: int = 20) -> float:
    """Spectral-norm estimate by deterministic power iteration."""
    n = Sigma.shape[0]
    v = np.full(n, 1.0 / np.sqrt(n))
    value = 0.0
    for _ in range(iters):
        w = Sigma @ v
        value = float(np.linalg.norm(w))
        if value == 0.0:
            return 0.0
        v = w / value
    return value


def project_f(system, tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
    """Project ``f`` onto ``range(Sigma)`` without an eigendecomposition.

    Solves ``min_v ||Sigma v - Sigma f||_2`` by LSQR (run to residual
    reduction ``tol`` or ``max_iter`` iterations); the minimal-norm solution
    is exactly the projection. When the result is indistinguishable from
    ``f`` (numerically full-rank ``Sigma`` or ``f`` already in the range),
    ``f`` is returned unchanged.
    """
    f = np.asarray(system.f, dtype=float)
    norm_f = np.linalg.norm(f)
    if norm_f == 0.0:
        return np.zeros_like(f)
    v = lsqr(system.Sigma, system.Sigma @ f, atol=tol, btol=tol,
             iter_lim=max_iter, conlim=0.0)[0]
    if np.linalg.norm(v - f) <= tol * norm_f:
        return f.copy()
    return v


def _reorthogonalize_euclid(vec, basis, count):
    for _ in range(2):
        vec -= basis[:, :count] @ (basis[:, :count].T @ vec)
    return vec


def init_gkb(system, l_max: int = 100) -> GkbState:
    """Initialize a bidiagonalization run (projection, first basis vectors)."""
    n = system.f.shape[0]
    capacity = l_max + 2
    state = GkbState(
        P=np.zeros((n, capacity)), Q=np.zeros((n, capacity)),
        Z=np.zeros((n, capacity)),
        c=np.zeros(n), w=np.zeros(n),
    )
    state.lambda_max = estimate_lambda_max(system.Sigma)
    fbar = project_f(system)
    state.null_norm = float(np.linalg.norm(system.f - fbar))
    beta1 = float(np.linalg.norm(fbar))
    state.beta1 = beta1
    state.betas.append(beta1)
    if beta1 == 0.0 or state.lambda_max == 0.0:
        state.terminated = True
        return state
    p1 = fbar / beta1
    t = system.Sigma @ p1
    alpha1 = float(np.sqrt(max(p1 @ t, 0.0)))
    if alpha1 <= BREAKDOWN_RTOL * state.lambda_max:
        state.terminated = True
        return state
    state.P[:, 0] = p1
    state.p_count = 1
    state.Q[:, 0] = p1 / alpha1
    state.Z[:, 0] = t / alpha1
    state.q_count = 1
    state.alphas.append(alpha1)
    state.rho_bar = alpha1
    state.phi_bar = beta1
    state.w = state.Q[:, 0].copy()
    return state


def _record_histories(state: GkbState) -> None:
    y = solution_y(state, state.l)
    state.residual_history.append(float(np.hypot(state.phi_bar, state.null_norm)))
    state.solution_norm_history.append(float(np.linalg.norm(y)))


def gkb_step(state: GkbState, system) -> GkbState:
    """Advance the bidiagonalization by one step and update the iterate.

    Applies the two coupled recursions with full reorthogonalization, then
    the Givens-QR update so that after the step ``state.c`` minimizes the
    projected residual over the current Krylov subspace. Sets
    ``state.terminated`` when ``alpha * beta`` falls below the breakdown
    threshold, at which point the iterate equals the minimal-norm
    least-squares solution.
    """
    if state.terminated:
        raise RuntimeError("bidiagonalization already terminated")
    i = state.l + 1  # this step produces p_{i+1}, q_{i+1}, c_i
    if state.p_count + 1 >= state.P.shape[1]:
        for name in ("P", "Q", "Z"):
            old = getattr(state, name)
            grown = np.zeros((old.shape[0], old.shape[1] * 2))
            grown[:, :old.shape[1]] = old
            setattr(state, name, grown)
    tol_break = BREAKDOWN_RTOL * state.lambda_max

    r = state.Z[:, i - 1] - state.alphas[i - 1] * state.P[:, i - 1]
    r = _reorthogonalize_euclid(r, state.P, state.p_count)
    beta_next = float(np.linalg.norm(r))
    state.betas.append(beta_next)

    # Givens rotation for the new subdiagonal entry; valid for any beta_next
    rho = float(np.hypot(state.rho_bar, beta_next))
    state.cbar, state.sbar = state.rho_bar / rho, beta_next / rho
    phi = state.cbar * state.phi_bar
    state.phi_bar = state.sbar * state.phi_bar
    state.rhos.append(rho)
    state.phis.append(phi)
    state.c = state.c + (phi / rho) * state.w
    state.l = i

    if beta_next <= tol_break:
        state.terminated = True
        _record_histories(state)
        return state

    p_next = r / beta_next
    state.P[:, i] = p_next
    state.p_count += 1

    s = p_next - beta_next * state.Q[:, i - 1]
    t = system.Sigma @ s
    for _ in range(2):  # Sigma-orthogonalization, consistent on s and Sigma@s
        gamma = state.Z[:, :state.q_count].T @ s
        s = s - state.Q[:, :state.q_count] @ gamma
        t = t - state.Z[:, :state.q_count] @ gamma
    t = system.Sigma @ s  # refresh: cached updates drift over many steps
    alpha_next = float(np.sqrt(max(s @ t, 0.0)))

    # alpha^2/||s||^2 is a Sigma-Rayleigh quotient; once it falls to the
    # roundoff floor of the quadratic form (~ n eps lambda_max) the new
    # direction is numerically in the null space and Sigma-normalizing it
    # would destroy the basis
    null_floor = 30.0 * s.shape[0] * np.finfo(float).eps * state.lambda_max
    if alpha_next * beta_next <= tol_break \
            or alpha_next ** 2 <= null_floor * (s @ s):
        state.terminated = True
        _record_histories(state)
        return state

    state.alphas.append(alpha_next)
    state.Q[:, i] = s / alpha_next
    state.Z[:, i] = t / alpha_next
    state.q_count += 1
    theta = state.sbar * alpha_next
    state.rho_bar = -state.cbar * alpha_next
    state.thetas.append(theta)
    state.w = state.Q[:, i] - (theta / rho) * state.w
    _record_histories(state)
    return state


def solution_y(state: GkbState, l: int) -> np.ndarray:
    """Projected solution ``y_l`` by back-substitution of the rotated factor."""
    if l < 1:
        return np.zeros(0)
    y = np.zeros(l)
    y[l - 1] = state.phis[l - 1] / state.rhos[l - 1]
    for j in range(l - 2, -1, -1):
        y[j] = (state.phis[j] - state.thetas[j] * y[j + 1]) / state.rhos[j]
    return y


def solution_at(state: GkbState, l: int) -> np.ndarray:
    """Coefficient iterate ``c_l = Q_l y_l`` for any ``1 <= l <= state.l``."""
    y = solution_y(state, l)
    return state.Q[:, :l] @ y


def bidiagonal_factor(state: GkbState, l: int | None = None) -> np.ndarray:
    """The (l+1) x l lower-bidiagonal factor built from the recursion scalars."""
    if l is None:
        l = state.l
    B = np.zeros((l + 1, l))
    diag = np.array(state.alphas[:l])
    B[np.arange(l), np.arange(l)] = diag
    sub = np.array(state.betas[1:l + 1])
    B[np.arange(1, l + 1), np.arange(l)] = sub
    return B


def run_gkb(system, l_max: int = 100) -> GkbState:
    """Run the bidiagonalization to ``l_max`` steps or breakdown."""
    state = init_gkb(system, l_max)
    while not state.terminated and state.l < l_max:
        gkb_step(state, system)
    return state


def menger_curvatures(points: np.ndarray) -> np.ndarray:
    """Signed Menger curvature at interior points, positive at an L-corner.

    ``points`` are (log residual, log solution norm) in iteration order; the
    residual decreases and the norm increases along the run, so a corner is
    a clockwise turn and the raw cross product is negated.
    """
    pts = np.asarray(points, dtype=float)
    m = pts.shape[0]
    curv = np.zeros(m)
    for k in range(1, m - 1):
        a = pts[k] - pts[k - 1]
        b = pts[k + 1] - pts[k]
        c = pts[k + 1] - pts[k - 1]
        denom = np.linalg.norm(a) * np.linalg.norm(b) * np.linalg.norm(c)
        if denom > 0:
            cross = a[0] * b[1] - a[1] * b[0]
            curv[k] = -2.0 * cross / denom
    return curv


def _lcurve_points(state: GkbState) -> np.ndarray:
    tiny = np.finfo(float).tiny
    res = np.maximum(np.asarray(state.residual_history), tiny)
    nrm = np.maximum(np.asarray(state.solution_norm_history), tiny)
    return np.column_stack([np.log(res), np.log(nrm)])


def run_iterative(system, stop, l_max: int = 100,
                  norm_kind: str = "HGbar") -> Estimate:
    """Early-stopped bidiagonalization solve.

    ``stop`` is a :class:`DiscrepancyStop` (requires the noise norm) or an
    :class:`LCurveStop`. The discrepancy principle returns the first iterate
    below the threshold; the L-curve rule keeps iterating ``window`` steps
    past the best corner candidate and returns the corner iterate. If a
    rule never fires the last iterate is returned and the report is flagged
    ``no_stop`` (plus ``no_corner`` when the discrete L-curve never bends).
    """
    start = time.perf_counter()
    if isinstance(stop, DiscrepancyStop):
        if stop.noise_norm is None:
            raise ValueError("discrepancy principle requires noise_norm")
        method = "IterativeDP"
    elif isinstance(stop, LCurveStop):
        method = "IterativeLC"
    else:
        raise TypeError(f"unknown stopping rule {stop!r}")

    state = init_gkb(system, l_max)
    flags: list[str] = []
    chosen: int | None = None
    while not state.terminated and state.l < l_max:
        gkb_step(state, system)
        if isinstance(stop, DiscrepancyStop):
            if state.residual_history[-1] <= stop.tau * stop.noise_norm:
                chosen = state.l
                break
        else:
            curv = menger_curvatures(_lcurve_points(state))
            if curv.size and curv.max() > 0:
                corner = int(np.argmax(curv)) + 1  # point k is iterate k+1
                if state.l - corner >= stop.window:
                    chosen = corner
                    break

    if chosen is None:
        flags.append("no_stop")
        if isinstance(stop, LCurveStop) and state.l >= 3:
            curv = menger_curvatures(_lcurve_points(state))
            if curv.max() > 0:
                chosen = int(np.argmax(curv)) + 1
            else:
                flags.append("no_corner")
        if chosen is None:
            chosen = state.l

    c = solution_at(state, chosen) if chosen >= 1 else np.zeros_like(system.f)
    phi = eval_estimate(system, c)
    residual_history = list(state.residual_history)
    norm_history = list(state.solution_norm_history)
    if not residual_history:  # degenerate: f orthogonal to range(Sigma)
        residual_history = [float(np.linalg.norm(system.f))]
        norm_history = [0.0]
    report = SolverReport(
        method=method,
        stop_iteration=chosen,
        residual_history=residual_history,
        solution_norm_history=norm_history,
        wall_time_seconds=time.perf_counter() - start,
        flags=flags,
    )
    return Estimate(c, phi, norm_kind, method, report)


# Weighted GCV for the projected problem ------------------------------------

def wgcv_function(svals, bhat, tail2, m, omega, lam_grid):
    """Weighted-GCV values for ``min ||B y - b||^2 + lam ||y||^2``.

    ``svals``/``bhat`` come from the SVD of the (m x n) projected matrix,
    ``tail2`` is the squared right-hand-side mass outside its column space.
    """
    s2 = svals[None, :] ** 2
    lam = np.asarray(lam_grid, dtype=float)[:, None]
    num = (((lam / (s2 + lam)) * bhat[None, :]) ** 2).sum(axis=1) + tail2
    den = (m - omega * (s2 / (s2 + lam)).sum(axis=1)) ** 2
    return m * num / den


def find_omega(svals, bhat, tail2, m) -> float:
    """Adaptive WGCV weight from the projected SVD.

    Assumes the target parameter sits at the smallest retained singular
    value, zeroes the GCV derivative there, and solves for the weight; the
    result is clipped to (0, 1].
    """
    lam_star = float(svals[-1]) ** 2
    s2 = svals ** 2
    w = 1.0 / (s2 + lam_star)
    b2 = bhat ** 2
    N = float(np.sum(b2 * lam_star ** 2 * w ** 2) + tail2)
    N_prime = float(np.sum(2.0 * lam_star * s2 * b2 * w ** 3))
    T = float(np.sum(s2 * w))
    T_prime = float(-np.sum(s2 * w ** 2))
    denom = N_prime * T - 2.0 * N * T_prime
    if denom <= 0 or N_prime <= 0:
        return 1.0
    return float(np.clip(m * N_prime / denom, 1e-6, 1.0))


def wgcv_lambda(svals, bhat, tail2, m, omega, n_grid: int = 200) -> float:
    """Minimize the weighted-GCV function over a log grid of parameters."""
    hi = float(svals[0]) ** 2
    if hi == 0.0:
        return 0.0
    grid = np.geomspace(hi * 1e-16, hi, n_grid)
    values = wgcv_function(svals, bhat, tail2, m, omega, grid)
    return float(grid[int(np.argmin(values))])


def run_hybrid(system, l_max: int = 100, norm_kind: str = "HGbar",
               force_lambda: float | None = None,
               stabilization_rtol: float = 1e-6,
               stabilization_window: int = 5) -> Estimate:
    """Hybrid solve: Tikhonov on the projected problem at every iteration.

    At step ``l`` the small factor ``B_l`` is decomposed by SVD and
    ``min ||B_l y - beta_1 e_1||^2 + mu ||y||^2`` is solved with ``mu``
    selected by weighted GCV (adaptive weight, running mean, starting at 1).
    Iteration stops when the regularized *solution* is stable to
    ``stabilization_rtol`` over ``stabilization_window`` consecutive steps
    (the residual stabilizes long before the iterate does), at breakdown,
    or at ``l_max``. The reported ``lambda`` is ``mu / (n0 J)``, directly
    comparable with the direct Tikhonov parameter.

    ``force_lambda`` pins ``mu`` (0 reproduces the pure iterative iterates).
    """
    start = time.perf_counter()
    state = init_gkb(system, l_max)
    n = system.f.shape[0]
    omega_hats: list[float] = []
    y = np.zeros(0)
    mu = 0.0
    flags: list[str] = []
    prev_c: np.ndarray | None = None
    stable = 0
    reg_residuals: list[float] = []
    reg_norms: list[float] = []

    while not state.terminated and state.l < l_max:
        gkb_step(state, system)
        l = state.l
        B = bidiagonal_factor(state, l)
        U, svals, Vt = np.linalg.svd(B, full_matrices=False)
        bhat = state.beta1 * U[0, :]
        tail2 = max(state.beta1 ** 2 - float(bhat @ bhat), 0.0)
        if force_lambda is not None:
            mu = float(force_lambda)
            if mu == 0.0:
                safe = np.where(svals > 0, svals, np.inf)
                y = Vt.T @ (bhat / safe)
            else:
                y = Vt.T @ ((svals / (svals ** 2 + mu)) * bhat)
        else:
            # weighted GCV of the *full* problem restricted to the Krylov
            # subspace: the data component orthogonal to range(Sigma) is an
            # irreducible residual and keeps the noise floor visible, so
            # the selected parameter does not collapse to zero once the
            # projected subproblem turns consistent
            resid_floor2 = tail2 + state.null_norm ** 2
            omega_hats.append(
                1.0 if l == 1 else find_omega(svals, bhat, resid_floor2, n))
            omega = float(np.mean(omega_hats))
            mu = wgcv_lambda(svals, bhat, resid_floor2, n, omega)
            y = Vt.T @ ((svals / (svals ** 2 + mu)) * bhat)
        reg_res = float(np.sqrt(
            np.sum(((mu / (svals ** 2 + mu)) * bhat) ** 2) + tail2
        )) if mu > 0 else float(np.sqrt(
            np.sum((bhat - svals * (Vt @ y)) ** 2) + tail2
        ))
        reg_residuals.append(float(np.hypot(reg_res, state.null_norm)))
        reg_norms.append(float(np.linalg.norm(y)))
        c_now = state.Q[:, :l] @ y
        if prev_c is not None:
            change = np.linalg.norm(c_now - prev_c)
            if change <= stabilization_rtol * max(np.linalg.norm(c_now),
                                                  np.finfo(float).tiny):
                stable += 1
                if stable >= stabilization_window:
                    break
            else:
                stable = 0
        prev_c = c_now

    if state.l == 0:  # degenerate system: f orthogonal to range(Sigma)
        c = np.zeros_like(system.f)
        reg_residuals = [float(np.linalg.norm(system.f))]
        reg_norms = [0.0]
        flags.append("degenerate")
    else:
        c = state.Q[:, :state.l] @ y
    phi = eval_estimate(system, c)
    if stable < stabilization_window and not state.terminated \
            and "degenerate" not in flags:
        flags.append("no_stop")
    report = SolverReport(
        method="Hybrid",
        lambda_=mu / n,
        stop_iteration=state.l,
        residual_history=reg_residuals,
        solution_norm_history=reg_norms,
        wall_time_seconds=time.perf_counter() - start,
        flags=flags,
    )
    return Estimate(c, phi, norm_kind, "Hybrid", report)
