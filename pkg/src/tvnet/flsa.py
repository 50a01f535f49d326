"""Exact 1-D fused-lasso signal approximation.

Solves, for a length-T target y,

    minimize_z  (1/2) sum_k (z_k - y_k)^2
                + lam_sparse * sum_k |z_k|
                + lam_fuse   * sum_{k>=2} |z_k - z_{k-1}|

exactly, as a pure fusion (total-variation) solve followed by elementwise
soft-thresholding at lam_sparse; the two-stage decomposition returns the
joint minimizer for this objective.

The fusion solve is a dynamic program over the derivative of the running
value function, which stays piecewise linear and increasing: each step
clips it to [-lam, lam] (recording the clip points), then adds the next
quadratic's slope-one term. Backtracking clamps each coordinate to its
recorded clip interval, which reproduces fused runs as exactly equal
floating-point values and is O(T) overall.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _tv_1d(y, lam, out, clip_lo, clip_hi, slope, icept, bound):
    """Total-variation denoising of one signal; scratch arrays supplied by caller."""
    n = y.shape[0]
    if n == 1:
        out[0] = y[0]
        return
    if lam <= 0.0:
        for k in range(n):
            out[k] = y[k]
        return

    # Derivative pieces live in slope/icept[lo..hi]; bound[j] is the
    # breakpoint between piece j and j+1. Effective coefficients are the
    # stored ones plus the running offsets (off_a, off_c), so the slope-one
    # term added at every step costs O(1).
    lo = n
    hi = n
    slope[n] = 1.0
    icept[n] = -y[0]
    off_a = 0.0
    off_c = 0.0

    for k in range(1, n):
        # Clip at -lam from the left.
        while lo < hi and (slope[lo] + off_a) * bound[lo] + (icept[lo] + off_c) < -lam:
            lo += 1
        a = slope[lo] + off_a
        c = icept[lo] + off_c
        b_lo = (-lam - c) / a
        # Clip at +lam from the right.
        while hi > lo and (slope[hi] + off_a) * bound[hi - 1] + (icept[hi] + off_c) > lam:
            hi -= 1
        a = slope[hi] + off_a
        c = icept[hi] + off_c
        b_hi = (lam - c) / a

        clip_lo[k - 1] = b_lo
        clip_hi[k - 1] = b_hi

        # Data term k enters every piece; flat +/-lam tails become new
        # slope-one end pieces.
        off_a += 1.0
        off_c -= y[k]
        lo -= 1
        slope[lo] = 1.0 - off_a
        icept[lo] = (-y[k] - lam) - off_c
        bound[lo] = b_lo
        hi += 1
        slope[hi] = 1.0 - off_a
        icept[hi] = (-y[k] + lam) - off_c
        bound[hi - 1] = b_hi

    # Root of the final derivative gives the last coordinate.
    while lo < hi and (slope[lo] + off_a) * bound[lo] + (icept[lo] + off_c) < 0.0:
        lo += 1
    z = -(icept[lo] + off_c) / (slope[lo] + off_a)
    out[n - 1] = z
    for k in range(n - 2, -1, -1):
        if z < clip_lo[k]:
            z = clip_lo[k]
        elif z > clip_hi[k]:
            z = clip_hi[k]
        out[k] = z


@njit(cache=True)
def _flsa_batch(ys, lam_sparse, lam_fuse, out):
    m, n = ys.shape
    cap = 2 * n + 2
    clip_lo = np.empty(n)
    clip_hi = np.empty(n)
    slope = np.empty(cap)
    icept = np.empty(cap)
    bound = np.empty(cap)
    for r in range(m):
        _tv_1d(ys[r], lam_fuse, out[r], clip_lo, clip_hi, slope, icept, bound)
        if lam_sparse > 0.0:
            for k in range(n):
                v = out[r, k]
                if v > lam_sparse:
                    out[r, k] = v - lam_sparse
                elif v < -lam_sparse:
                    out[r, k] = v + lam_sparse
                else:
                    out[r, k] = 0.0


def tv_denoise(y, lam_fuse):
    """Exact total-variation denoising of a 1-D signal."""
    return flsa_1d(y, 0.0, lam_fuse)


def flsa_1d(y, lam_sparse, lam_fuse):
    """Exact minimizer of the 1-D fused-lasso objective for one trajectory."""
    y = np.ascontiguousarray(y, dtype=float).reshape(1, -1)
    if lam_sparse < 0 or lam_fuse < 0:
        raise ValueError("penalties must be nonnegative")
    out = np.empty_like(y)
    _flsa_batch(y, float(lam_sparse), float(lam_fuse), out)
    return out[0]


def flsa_batch(ys, lam_sparse, lam_fuse):
    """Row-wise flsa_1d over an (m, T) array of independent trajectories."""
    ys = np.ascontiguousarray(ys, dtype=float)
    if ys.ndim != 2:
        raise ValueError("ys must be 2-D (one trajectory per row)")
    if lam_sparse < 0 or lam_fuse < 0:
        raise ValueError("penalties must be nonnegative")
    out = np.empty_like(ys)
    _flsa_batch(ys, float(lam_sparse), float(lam_fuse), out)
    return out
