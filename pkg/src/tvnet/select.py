"""Degrees of freedom, information criterion, and tuning-parameter search.

The criterion is the Gaussian negative log-likelihood of the reconstructed
precision matrices plus a log(n) * df complexity penalty:

    n * sum_k [ -log|Omega_hat(t_k)| + tr(Omega_hat(t_k) S(t_k)) ] + log(n) * df.

df depends on the penalty. For the squared-smoothness estimator it is the
trace of the active-set ridge hat matrix

    tr[ (Xa'Xa + eta I + n*lam2 Da'Da)^{-1} (Xa'Xa + eta I) ],

computed by a dense solve on the active set (the small eta perturbation
makes the restricted Gram invertible; with it, the direct trace above and
the rewritten form tr[(I + n*lam2 (Xa'Xa + eta I)^{-1} Da'Da)^{-1}] are
algebraically identical). For the fusion estimator df is the integer count
of nonzero fused groups across all pair trajectories, and for the plain
lasso it is the active-set size.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .admm import AdmmConfig
from .errors import AllCellsFailed, NotPositiveDefinite, Singular
from .design import _pair_tables, sample_covariance
from .linalg import log_det_pd, symmetrize


@dataclass(frozen=True)
class DfConfig:
    """Ridge perturbation and active-set threshold for the df computation."""

    eta: float = 1e-5
    active_tol: float = 1e-8

    def __post_init__(self):
        if self.eta <= 0 or self.active_tol < 0:
            raise ValueError("eta must be positive and active_tol nonnegative")


def active_set(theta, tol):
    """Flat (time-major) indices of coefficients with |theta| above tol."""
    return np.flatnonzero(np.abs(np.asarray(theta).ravel()) > tol)


def _active_gram_and_stencil(design, active):
    """Restrict blockdiag(X'X) and the difference stencil D'D to the active set."""
    T, b = design.T, design.b
    k_idx = active // b
    j_idx = active % b
    m = active.size

    gram = np.zeros((m, m))
    for k in range(T):
        members = np.flatnonzero(k_idx == k)
        if members.size:
            cols = j_idx[members]
            gram[np.ix_(members, members)] = design.XtX[k][np.ix_(cols, cols)]

    stencil = np.zeros((m, m))
    if T > 1:
        diag = np.where((k_idx == 0) | (k_idx == T - 1), 1.0, 2.0)
        stencil[np.diag_indices(m)] = diag
        position = -np.ones((T, b), dtype=int)
        position[k_idx, j_idx] = np.arange(m)
        for a in range(m):
            k, j = k_idx[a], j_idx[a]
            if k + 1 < T and position[k + 1, j] >= 0:
                nxt = position[k + 1, j]
                stencil[a, nxt] = -1.0
                stencil[nxt, a] = -1.0
    return gram, stencil


def df_gen(design, theta_hat, lambda2, cfg=None):
    """Hat-matrix-trace degrees of freedom of the squared-smoothness fit.

    Retries with eta grown tenfold (up to 1e-2) if the perturbed system is
    still numerically singular, then raises Singular.
    """
    cfg = cfg or DfConfig()
    active = active_set(theta_hat, cfg.active_tol)
    if active.size == 0:
        return 0.0
    gram, stencil = _active_gram_and_stencil(design, active)
    eye = np.eye(active.size)

    eta = cfg.eta
    while eta <= 1e-2:
        numerator = gram + eta * eye
        try:
            solved = np.linalg.solve(numerator + design.n * lambda2 * stencil, numerator)
        except np.linalg.LinAlgError:
            eta *= 10.0
            continue
        df = float(np.trace(solved))
        if np.isfinite(df):
            return float(np.clip(df, 0.0, active.size))
        eta *= 10.0
    raise Singular("active-set system remained singular up to eta = 1e-2")


def df_gen_identity(design, theta_hat, lambda2, cfg=None):
    """The rewritten trace tr[(I + n*lam2 (Xa'Xa + eta I)^{-1} Da'Da)^{-1}].

    Algebraically equal to df_gen; kept as an independent evaluation path
    for cross-checking.
    """
    cfg = cfg or DfConfig()
    active = active_set(theta_hat, cfg.active_tol)
    if active.size == 0:
        return 0.0
    gram, stencil = _active_gram_and_stencil(design, active)
    eye = np.eye(active.size)
    inner = np.linalg.solve(gram + cfg.eta * eye, stencil)
    return float(np.trace(np.linalg.inv(eye + design.n * lambda2 * inner)))


def df_gfl(theta_hat, tol=1e-8):
    """Number of nonzero fused groups over all pair trajectories.

    Per pair: one for a nonzero start, plus one for every later time point
    that is nonzero and differs from its predecessor. The fused solver
    produces exact zeros and ties; tol is a safety net.
    """
    theta = np.asarray(theta_hat, dtype=float)
    nonzero = np.abs(theta) > tol
    count = int(nonzero[0].sum())
    if theta.shape[0] > 1:
        changed = np.abs(theta[1:] - theta[:-1]) > tol
        count += int((changed & nonzero[1:]).sum())
    return count


def df_for_fit(design, fit_result, cfg=None):
    """Method-appropriate degrees of freedom for a completed fit."""
    cfg = cfg or DfConfig()
    if fit_result.method == "gen" and fit_result.lambda2 > 0:
        return df_gen(design, fit_result.theta, fit_result.lambda2, cfg)
    if fit_result.method == "gfl" and fit_result.lambda2 > 0:
        return float(df_gfl(fit_result.theta, cfg.active_tol))
    # Plain lasso limit (either method at lambda2 = 0): the active-set size.
    return float(active_set(fit_result.theta, cfg.active_tol).size)


def precision_from_fit(theta_row, sigma_row):
    """Reconstruct one precision matrix from (rho, sigma) at a time point.

    Off-diagonals are -rho_ij * sqrt(sigma_ii * sigma_jj); positive
    definiteness is not guaranteed and is checked downstream.
    """
    sigma_row = np.asarray(sigma_row, dtype=float)
    p = sigma_row.size
    first, second, _ = _pair_tables(p)
    omega = np.diag(sigma_row)
    off = -np.asarray(theta_row) * np.sqrt(sigma_row[first] * sigma_row[second])
    omega[first, second] = off
    omega[second, first] = off
    return omega


def bic(dataset, fit_result):
    """Information criterion of a completed fit; +inf when a reconstructed
    precision matrix stays indefinite after the ridge repair."""
    n = dataset.n
    total = 0.0
    for k in range(dataset.T):
        omega = precision_from_fit(fit_result.theta[k], fit_result.sigma[k])
        s = sample_covariance(dataset, k)
        try:
            logdet = log_det_pd(omega)
        except NotPositiveDefinite:
            delta = abs(float(np.linalg.eigvalsh(symmetrize(omega)).min())) + 1e-6
            omega = omega + delta * np.eye(omega.shape[0])
            try:
                logdet = log_det_pd(omega)
            except NotPositiveDefinite:
                return np.inf
        total += -logdet + float(np.sum(omega * s))
    return n * total + math.log(n) * fit_result.df


@dataclass
class BicSurface:
    """Per-cell criterion values over a (lambda1, lambda2) grid."""

    lambda1_grid: np.ndarray
    lambda2_grid: np.ndarray
    bic: np.ndarray  # (len(grid1), len(grid2))
    df: np.ndarray
    converged: np.ndarray  # bool
    best: tuple  # (i, j) of the selected cell


def _fit_cell(args):
    dataset, lambda1, lambda2, outer_cfg, admm_cfg = args
    from .outer import fit

    return fit(dataset, lambda1, lambda2, outer_cfg, admm_cfg)


def grid_search(dataset, method, lambda1_grid, lambda2_grid, outer_cfg=None, admm_cfg=None, n_jobs=1):
    """Fit every grid cell, pick the minimum-criterion cell, return surface and best fit.

    Ties are broken toward larger (lambda1, lambda2), i.e. the sparser and
    smoother solution. Cells are independent and may be evaluated by a
    process pool; results are assembled by index, so the outcome does not
    depend on completion order or worker count.
    """
    from .outer import OuterConfig

    lambda1_grid = np.atleast_1d(np.asarray(lambda1_grid, dtype=float))
    lambda2_grid = np.atleast_1d(np.asarray(lambda2_grid, dtype=float))
    if lambda1_grid.size == 0 or lambda2_grid.size == 0:
        raise ValueError("tuning grids must be nonempty")
    if method == "gen" and np.any(lambda2_grid <= 0):
        raise ValueError("the gen method needs a strictly positive lambda2 grid")
    if method == "lasso":
        lambda2_grid = np.zeros(1)

    outer_cfg = replace(outer_cfg or OuterConfig(), method=method)
    admm_cfg = admm_cfg or AdmmConfig()

    cells = [
        (dataset, l1, l2, outer_cfg, admm_cfg)
        for l1 in lambda1_grid
        for l2 in lambda2_grid
    ]
    if n_jobs > 1 and len(cells) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            fits = list(pool.map(_fit_cell, cells))
    else:
        fits = [_fit_cell(c) for c in cells]

    shape = (lambda1_grid.size, lambda2_grid.size)
    bic_grid = np.array([f.bic for f in fits]).reshape(shape)
    df_grid = np.array([f.df for f in fits]).reshape(shape)
    conv_grid = np.array([f.converged for f in fits]).reshape(shape)

    if not np.any(np.isfinite(bic_grid)):
        raise AllCellsFailed("no grid cell produced a finite criterion value")

    best = None
    for i in range(shape[0]):
        for j in range(shape[1]):
            if not np.isfinite(bic_grid[i, j]):
                continue
            if (
                best is None
                or bic_grid[i, j] < bic_grid[best]
                or (
                    bic_grid[i, j] == bic_grid[best]
                    and (lambda1_grid[i], lambda2_grid[j])
                    > (lambda1_grid[best[0]], lambda2_grid[best[1]])
                )
            ):
                best = (i, j)

    surface = BicSurface(
        lambda1_grid=lambda1_grid,
        lambda2_grid=lambda2_grid,
        bic=bic_grid,
        df=df_grid,
        converged=conv_grid,
        best=best,
    )
    return surface, fits[best[0] * shape[1] + best[1]]
