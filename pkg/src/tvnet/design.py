"""Regression structures for joint partial-correlation estimation.

Each variable is regressed on all others with symmetric partial-correlation
coefficients. Stacking the p per-variable regressions at one time point
gives a response vector Y(t_k) of length n*p and a sparse design matrix
whose column for pair (i, j) carries sqrt(sigma_jj/sigma_ii) * X_j in
response block i and sqrt(sigma_ii/sigma_jj) * X_i in response block j.
The full multi-time design is block diagonal over time.

The design matrix itself is never materialized: every solver update only
needs the per-time products X'X, X'Y and ||Y||^2, which this module builds
directly from the p x p Gram matrix of the data.

Conventions used throughout the package:

  * pairs are ordered lexicographically: (1,2), (1,3), ..., (1,p), (2,3),
    ..., (p-1,p); indices in the public API are 1-based;
  * a partial-correlation field is a (T, p(p-1)/2) array; flattening it
    C-style (time-major) matches the stacked coefficient vector;
  * the first-difference operator over time has rows theta(t_k) -
    theta(t_{k+1}) for k = 1..T-1, applied pairwise within each column.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateColumn, InvalidPair, ShapeMismatch


def n_pairs(p):
    return p * (p - 1) // 2


def pair_index(i, j, p):
    """Flat lexicographic index of the variable pair (i, j), 1-based, i < j."""
    if not (1 <= i < j <= p):
        raise InvalidPair(f"need 1 <= i < j <= p, got ({i}, {j}) with p={p}")
    return (i - 1) * (2 * p - i) // 2 + (j - i - 1)


def pair_list(p):
    """All pairs (i, j), 1-based, in flat-index order."""
    return [(i, j) for i in range(1, p + 1) for j in range(i + 1, p + 1)]


@lru_cache(maxsize=None)
def _pair_tables(p):
    """0-based index arrays used to vectorize design products.

    Returns (first, second, by_var) where first/second are the 0-based
    endpoints of each pair and by_var[r] = (pair indices containing r,
    the other endpoint of each such pair).
    """
    pairs = pair_list(p)
    first = np.array([i - 1 for i, _ in pairs], dtype=np.intp)
    second = np.array([j - 1 for _, j in pairs], dtype=np.intp)
    by_var = []
    for r in range(p):
        idx = np.flatnonzero((first == r) | (second == r))
        other = np.where(first[idx] == r, second[idx], first[idx])
        by_var.append((idx, other))
    return first, second, by_var


@dataclass(frozen=True)
class TemporalDataset:
    """Centered n x p observation matrices at T equidistant time points."""

    data: np.ndarray  # (T, n, p), each column mean-zero
    time_grid: np.ndarray  # (T,)

    @property
    def T(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]

    @property
    def p(self):
        return self.data.shape[2]


def center_per_timepoint(raw, time_grid=None):
    """Center every column of every time slice to mean zero.

    The original scale is preserved (no standardization). Raises
    DegenerateColumn for constant columns, whose variance-based precision
    initialization would divide by zero.
    """
    arrs = [np.asarray(m, dtype=float) for m in raw]
    shape = arrs[0].shape
    if any(a.shape != shape for a in arrs) or len(shape) != 2:
        raise ShapeMismatch("all time slices must be n x p matrices of one shape")
    n, p = shape
    if n < 2:
        raise ShapeMismatch("need at least two observations per time point")
    data = np.stack(arrs)
    spans = data.max(axis=1) - data.min(axis=1)
    if np.any(spans == 0.0):
        k, i = np.argwhere(spans == 0.0)[0]
        raise DegenerateColumn(f"variable {i + 1} is constant at time point {k + 1}")
    data = data - data.mean(axis=1, keepdims=True)
    if time_grid is None:
        T = data.shape[0]
        time_grid = np.linspace(0.0, 1.0, T) if T > 1 else np.zeros(1)
    else:
        time_grid = np.asarray(time_grid, dtype=float)
        if time_grid.shape != (data.shape[0],):
            raise ShapeMismatch("time_grid length must equal the number of time points")
    return TemporalDataset(data=data, time_grid=time_grid)


def sample_covariance(dataset, k):
    """Sample covariance S(t_k) with denominator n - 1 on the centered data."""
    x = dataset.data[k]
    return x.T @ x / (dataset.n - 1)


@dataclass(frozen=True)
class StackedDesign:
    """Per-time design products for the stacked pair regression.

    XtX[k] is the p(p-1)/2 square Gram matrix of the time-k design block,
    Xty[k] the matching cross product with the stacked response, and yty[k]
    the squared response norm. All are functions of the data and of the
    current precision diagonals sigma.
    """

    XtX: np.ndarray  # (T, b, b)
    Xty: np.ndarray  # (T, b)
    yty: np.ndarray  # (T,)
    n: int
    p: int

    @property
    def T(self):
        return self.XtX.shape[0]

    @property
    def b(self):
        return self.XtX.shape[1]


def build_design(dataset, sigma):
    """Assemble the stacked-design products for given precision diagonals.

    Parameters
    ----------
    dataset : TemporalDataset
    sigma : ndarray, shape (T, p)
        Strictly positive precision diagonals sigma^ii(t_k).
    """
    sigma = np.asarray(sigma, dtype=float)
    T, n, p = dataset.data.shape
    if sigma.shape != (T, p):
        raise ShapeMismatch(f"sigma must have shape {(T, p)}, got {sigma.shape}")
    if np.any(sigma <= 0):
        raise ShapeMismatch("sigma entries must be strictly positive")
    first, second, by_var = _pair_tables(p)
    b = n_pairs(p)

    XtX = np.zeros((T, b, b))
    Xty = np.zeros((T, b))
    yty = np.zeros(T)
    for k in range(T):
        x = dataset.data[k]
        gram = x.T @ x
        sig = sigma[k]
        for r in range(p):
            idx, other = by_var[r]
            w = np.sqrt(sig[other] / sig[r])
            XtX[k][np.ix_(idx, idx)] += np.outer(w, w) * gram[np.ix_(other, other)]
        ratio = sig[second] / sig[first]
        Xty[k] = (np.sqrt(ratio) + np.sqrt(1.0 / ratio)) * gram[first, second]
        yty[k] = np.trace(gram)
    return StackedDesign(XtX=XtX, Xty=Xty, yty=yty, n=n, p=p)


def time_diff(theta):
    """First differences over time: rows theta(t_k) - theta(t_{k+1})."""
    theta = np.asarray(theta)
    return theta[:-1] - theta[1:]


def time_diff_adjoint(s, T=None):
    """Adjoint of time_diff; maps (T-1, b) difference weights back to (T, b)."""
    s = np.asarray(s)
    if T is None:
        T = s.shape[0] + 1
    out = np.zeros((T,) + s.shape[1:])
    out[:-1] += s
    out[1:] -= s
    return out


def diff_gram(theta):
    """Apply D'D, the tridiagonal second-difference stencil, to a (T, b) field."""
    theta = np.asarray(theta)
    if theta.shape[0] == 1:
        return np.zeros_like(theta)
    return time_diff_adjoint(time_diff(theta), T=theta.shape[0])
