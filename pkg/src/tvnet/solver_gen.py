"""Solver for the squared-smoothness ("elastic-net over time") objective

    (1/n) ||Y - X theta||^2 + lam1 ||theta||_1 + lam2 ||D theta||^2,

where D takes first differences of each pair trajectory over time.

The quadratic theta-update solves

    (2/n X'X + 2 lam2 D'D + a I) theta = 2/n X'Y + a (z - u),

whose matrix is symmetric block tridiagonal with off-diagonal blocks
-2 lam2 I. Dividing by 2 lam2 puts it in the unit-off-diagonal form the
structured solver expects, with diagonal blocks

    A_k = X(t_k)'X(t_k) / (n lam2) + (1 + a/(2 lam2)) I     k in {1, T}
    A_k = X(t_k)'X(t_k) / (n lam2) + (2 + a/(2 lam2)) I     otherwise.

The matrix is iteration constant, so it is factorized once per solve. The
z-update is plain soft-thresholding, and z (the exactly sparse iterate) is
returned as the estimate.
"""

import numpy as np

from .admm import AdmmConfig, AdmmState, residual_bounds, soft_threshold
from .design import diff_gram
from .linalg import BlockTridiagSystem, block_tridiag_factorize, block_tridiag_solve


def build_gen_system(design, lambda2, a):
    """Block-tridiagonal form of the theta-update matrix for given (lambda2, a)."""
    if lambda2 <= 0:
        raise ValueError("the squared-smoothness solver requires lambda2 > 0")
    T, b, n = design.T, design.b, design.n
    eye = np.eye(b)
    blocks = np.empty((T, b, b))
    for k in range(T):
        if T == 1:
            shift = a / (2.0 * lambda2)
        elif k == 0 or k == T - 1:
            shift = 1.0 + a / (2.0 * lambda2)
        else:
            shift = 2.0 + a / (2.0 * lambda2)
        blocks[k] = design.XtX[k] / (n * lambda2) + shift * eye
    return BlockTridiagSystem(diag_blocks=blocks, scale=2.0 * lambda2)


def gen_theta_update(design, z, u, a, fact):
    """Closed-form quadratic update via the pre-factorized structured system."""
    rhs = (2.0 / design.n) * design.Xty + a * (z - u)
    return block_tridiag_solve(fact, rhs.ravel()).reshape(design.T, design.b)


def objective(design, theta, lam1, lam2):
    """Value of the penalized loss at a (T, b) coefficient field."""
    theta = np.asarray(theta)
    quad = 0.0
    for k in range(design.T):
        quad += theta[k] @ design.XtX[k] @ theta[k] - 2.0 * design.Xty[k] @ theta[k] + design.yty[k]
    diffs = theta[:-1] - theta[1:]
    return quad / design.n + lam1 * np.abs(theta).sum() + lam2 * (diffs**2).sum()


def solve_gen(design, lambda1, lambda2, cfg=None, z0=None):
    """Minimize the squared-smoothness objective for one (lambda1, lambda2).

    Parameters
    ----------
    design : StackedDesign
    lambda1 : float, >= 0
    lambda2 : float, > 0
    cfg : AdmmConfig, optional
    z0 : ndarray (T, b), optional
        Warm start for the sparse iterate (dual starts at zero).

    Returns
    -------
    (theta, state) : the exactly sparse iterate z and the solver state.
    """
    if lambda1 < 0:
        raise ValueError("lambda1 must be nonnegative")
    cfg = cfg or AdmmConfig()
    a = cfg.a
    T, b = design.T, design.b

    fact = block_tridiag_factorize(build_gen_system(design, lambda2, a))
    z = np.zeros((T, b)) if z0 is None else np.array(z0, dtype=float)
    u = np.zeros((T, b))
    theta = np.zeros((T, b))
    kappa = lambda1 / a

    primal_hist, dual_hist = [], []
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        theta = gen_theta_update(design, z, u, a, fact)
        z_old = z
        z = soft_threshold(theta + u, kappa)
        u = u + theta - z

        r_norm = np.linalg.norm(theta - z)
        s_norm = a * np.linalg.norm(z - z_old)
        primal_hist.append(r_norm)
        dual_hist.append(s_norm)
        eps_pri, eps_dual = residual_bounds(theta, z, u, a, cfg)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    state = AdmmState(
        theta=theta,
        z=z,
        u=u,
        iterations=it,
        primal_residual=primal_hist[-1],
        dual_residual=dual_hist[-1],
        converged=converged,
        primal_history=primal_hist,
        dual_history=dual_hist,
    )
    return z, state


def smooth_gradient(design, theta, lambda2):
    """Gradient of the differentiable part: 2/n (X'X theta - X'Y) + 2 lam2 D'D theta."""
    theta = np.asarray(theta)
    grad = np.empty_like(theta)
    for k in range(design.T):
        grad[k] = design.XtX[k] @ theta[k] - design.Xty[k]
    grad *= 2.0 / design.n
    if lambda2:
        grad += 2.0 * lambda2 * diff_gram(theta)
    return grad
