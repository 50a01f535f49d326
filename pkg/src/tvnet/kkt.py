"""Subgradient optimality certificates for the penalized objectives.

These checkers certify a candidate solution directly from first-order
conditions; they share no code path with the solvers, so solver tests can
use them as independent oracles.

For objectives with an absolute-difference penalty along a chain, the
stationarity condition at coordinate k reads

    g_k + lam_sparse * v_k + lam_fuse * (s_k - s_{k-1}) = 0,

with v_k a subgradient of |x_k|, s_k a subgradient of |x_k - x_{k+1}| and
s_0 = s_T = 0. Free subgradients (at zeros and ties) make this a
feasibility question, answered exactly by forward interval propagation
over the s_k.
"""

import numpy as np

from .solver_gen import smooth_gradient as _gen_gradient
from .solver_gfl import smooth_gradient as _gfl_gradient


def kkt_scale(design):
    """Normalization 1 + ||2/n X'Y||_inf used by the certificate tolerances."""
    return 1.0 + np.abs((2.0 / design.n) * design.Xty).max()


def chain_stationarity_ok(g, x, lam_sparse, lam_fuse, tol, zero_tol=0.0):
    """Feasibility of the chain stationarity conditions within +-tol per coordinate.

    Classifies zeros of x (and ties of consecutive entries) at zero_tol;
    exact outputs of the fused solvers need zero_tol = 0.
    """
    g = np.asarray(g, dtype=float)
    x = np.asarray(x, dtype=float)
    T = x.shape[0]

    if lam_fuse == 0.0:
        # No chain coupling: per-coordinate lasso conditions.
        resid = np.where(
            np.abs(x) > zero_tol,
            np.abs(g + lam_sparse * np.sign(x)),
            np.maximum(np.abs(g) - lam_sparse, 0.0),
        )
        return bool(resid.max() <= tol) if resid.size else True

    lo, hi = 0.0, 0.0  # feasible interval for lam_fuse * s_k; s_0 = 0
    for k in range(T):
        if abs(x[k]) > zero_tol:
            v_lo = v_hi = np.sign(x[k])
        else:
            v_lo, v_hi = -1.0, 1.0
        # s_k = s_{k-1} - (g_k + lam_sparse * v_k + slack) / lam_fuse, scaled
        # through by lam_fuse.
        lo = lo - g[k] - lam_sparse * v_hi - tol
        hi = hi - g[k] - lam_sparse * v_lo + tol
        if k < T - 1:
            if abs(x[k] - x[k + 1]) > zero_tol:
                s = lam_fuse * np.sign(x[k] - x[k + 1])
                lo, hi = max(lo, s), min(hi, s)
            else:
                lo, hi = max(lo, -lam_fuse), min(hi, lam_fuse)
        else:
            lo, hi = max(lo, 0.0), min(hi, 0.0)  # s_T = 0
        if lo > hi:
            return False
    return True


def flsa_optimality_ok(y, z, lam_sparse, lam_fuse, tol=1e-10):
    """Exact subgradient certificate for the 1-D fused-lasso minimizer."""
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    return chain_stationarity_ok(z - y, z, lam_sparse, lam_fuse, tol)


def gen_kkt_residual(design, theta, lambda1, lambda2):
    """Max stationarity violation of the squared-smoothness objective at theta.

    At nonzero coordinates the full gradient plus lambda1*sign must vanish;
    at zeros the smooth gradient must lie within [-lambda1, lambda1].
    """
    theta = np.asarray(theta, dtype=float)
    g = _gen_gradient(design, theta, lambda2)
    nonzero = theta != 0.0
    resid = np.where(
        nonzero,
        np.abs(g + lambda1 * np.sign(theta)),
        np.maximum(np.abs(g) - lambda1, 0.0),
    )
    return float(resid.max())


def gfl_kkt_ok(design, theta, lambda1, lambda2, tol, zero_tol=0.0):
    """Certificate for the fusion-smoothness objective at theta.

    Checks, pair by pair, that valid subgradients of both penalties exist
    making the stationarity residual at most tol per coordinate.
    """
    theta = np.asarray(theta, dtype=float)
    g = _gfl_gradient(design, theta)
    for j in range(theta.shape[1]):
        if not chain_stationarity_ok(g[:, j], theta[:, j], lambda1, lambda2, tol, zero_tol):
            return False
    return True
