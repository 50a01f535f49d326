"""Structured and dense symmetric linear algebra.

The central object is a symmetric block-tridiagonal system

    M = scale * [[A_1, -I,   0, ...],
                 [-I,  A_2, -I, ...],
                 [        ...      ],
                 [0, ...,  -I, A_T]]

with T symmetric b x b diagonal blocks and constant -I off-diagonal blocks.
Such systems arise as the quadratic-update matrix of the smooth-penalty
solver, where they stay fixed across iterations, so factorizing once and
solving many right-hand sides is the dominant access pattern.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotPositiveDefinite, ShapeMismatch, Singular, SingularBlock

# Pivot blocks with condition numbers above this are treated as singular.
COND_MAX = 1e12


def symmetrize(m):
    """Average a square matrix with its transpose (guards drift from upstream products)."""
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class BlockTridiagSystem:
    """Symmetric block-tridiagonal system with implicit -I off-diagonal blocks.

    Parameters
    ----------
    diag_blocks : ndarray, shape (T, b, b)
        The diagonal blocks A_1..A_T; each must be symmetric.
    scale : float
        Scalar multiplier applied to the whole assembled matrix.
    """

    diag_blocks: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        blocks = np.asarray(self.diag_blocks, dtype=float)
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise ShapeMismatch(f"diag_blocks must be (T, b, b), got {blocks.shape}")
        if blocks.shape[0] < 1 or blocks.shape[1] < 1:
            raise ShapeMismatch("need T >= 1 and b >= 1")
        asym = np.abs(blocks - blocks.transpose(0, 2, 1)).max()
        norm = max(np.abs(blocks).max(), 1.0)
        if asym > 1e-12 * norm:
            raise ShapeMismatch(f"diagonal blocks are not symmetric (relative asymmetry {asym / norm:.2e})")
        object.__setattr__(self, "diag_blocks", 0.5 * (blocks + blocks.transpose(0, 2, 1)))
        if not self.scale or not np.isfinite(self.scale):
            raise ShapeMismatch("scale must be finite and nonzero")

    @property
    def n_blocks(self):
        return self.diag_blocks.shape[0]

    @property
    def block_dim(self):
        return self.diag_blocks.shape[1]

    def to_dense(self):
        """Assemble the full (T*b) x (T*b) matrix. Intended for small systems."""
        T, b = self.n_blocks, self.block_dim
        full = np.zeros((T * b, T * b))
        eye = np.eye(b)
        for k in range(T):
            full[k * b:(k + 1) * b, k * b:(k + 1) * b] = self.diag_blocks[k]
            if k + 1 < T:
                full[k * b:(k + 1) * b, (k + 1) * b:(k + 2) * b] = -eye
                full[(k + 1) * b:(k + 2) * b, k * b:(k + 1) * b] = -eye
        return self.scale * full


@dataclass(frozen=True)
class BlockTridiagFactorization:
    """Pivot-inverse sequence B_1 = A_1^{-1}, B_i = (A_i - B_{i-1})^{-1}.

    Immutable after creation; safe to share across concurrent solves.
    """

    pivot_inverses: np.ndarray  # (T, b, b)
    scale: float

    @property
    def n_blocks(self):
        return self.pivot_inverses.shape[0]

    @property
    def block_dim(self):
        return self.pivot_inverses.shape[1]


def _inv_symmetric(m, index):
    """Invert a symmetric block via its eigendecomposition, checking conditioning."""
    w, v = np.linalg.eigh(m)
    absw = np.abs(w)
    if absw.min() == 0.0 or absw.max() / absw.min() > COND_MAX:
        raise SingularBlock(index)
    inv = (v / w) @ v.T
    return symmetrize(inv)


def block_tridiag_factorize(system):
    """Compute the pivot-inverse sequence enabling fast repeated solves.

    Raises
    ------
    SingularBlock
        If any pivot A_i - B_{i-1} is numerically singular.
    """
    blocks = system.diag_blocks
    pivots = np.empty_like(blocks)
    pivots[0] = _inv_symmetric(blocks[0], 0)
    for i in range(1, system.n_blocks):
        pivots[i] = _inv_symmetric(blocks[i] - pivots[i - 1], i)
    return BlockTridiagFactorization(pivot_inverses=pivots, scale=system.scale)


def block_tridiag_solve(fact, rhs):
    """Solve M x = rhs by block forward elimination and back substitution.

    `rhs` is a vector of length T*b (or a (T*b, m) stack of right-hand
    sides) laid out block-major.
    """
    T, b = fact.n_blocks, fact.block_dim
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != T * b or rhs.ndim > 2:
        raise DimensionMismatch(f"rhs has shape {rhs.shape}, expected length {T * b}")
    cols = rhs.reshape(T, b, -1)
    pivots = fact.pivot_inverses

    fwd = np.empty_like(cols)
    fwd[0] = cols[0]
    for i in range(1, T):
        fwd[i] = cols[i] + pivots[i - 1] @ fwd[i - 1]

    x = np.empty_like(cols)
    x[T - 1] = pivots[T - 1] @ fwd[T - 1]
    for i in range(T - 2, -1, -1):
        x[i] = pivots[i] @ (fwd[i] + x[i + 1])

    return x.reshape(rhs.shape) / fact.scale


def sym_solve(m, rhs, ridge=0.0):
    """Solve the symmetric system (M + ridge*I) x = rhs.

    M is symmetrized on entry. Raises Singular when the factorization fails
    or the residual exceeds 1e-8 relative to the right-hand side.
    """
    m = symmetrize(np.asarray(m, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != m.shape[0]:
        raise DimensionMismatch(f"rhs length {rhs.shape[0]} != matrix order {m.shape[0]}")
    if ridge:
        m = m + ridge * np.eye(m.shape[0])
    try:
        x = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise Singular(str(exc)) from exc
    resid = np.linalg.norm(m @ x - rhs)
    if resid > 1e-8 * max(np.linalg.norm(rhs), 1e-300):
        raise Singular(f"solve residual {resid:.2e} too large")
    return x


def log_det_pd(m):
    """Log determinant of a symmetric positive-definite matrix via Cholesky.

    Raises NotPositiveDefinite when the factorization fails, signalling the
    caller to apply its ridge fallback.
    """
    m = symmetrize(np.asarray(m, dtype=float))
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    return 2.0 * np.sum(np.log(np.diag(chol)))
