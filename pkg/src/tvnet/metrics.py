"""Evaluation metrics for estimated partial-correlation fields.

The estimation error sums, over time, the root of the squared deviations
over all ordered pairs i != j; since the field stores each unordered pair
once, every time slice contributes sqrt(2) times its Euclidean deviation.
Readers comparing against an unordered-pair convention should divide each
slice by sqrt(2).

The detection score is the probability that a randomly chosen truly active
(pair, time) cell outranks a randomly chosen inactive one by |estimate|,
with ties counted one half (the fused estimator produces exact ties, so
the tie rule matters).
"""

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateMask, DimensionMismatch


def estimation_error(theta_hat, theta_true):
    """Sum over time of per-slice ordered-pair deviation norms."""
    theta_hat = np.asarray(theta_hat, dtype=float)
    theta_true = np.asarray(theta_true, dtype=float)
    if theta_hat.shape != theta_true.shape:
        raise DimensionMismatch(f"shapes {theta_hat.shape} and {theta_true.shape} differ")
    slice_norms = np.linalg.norm(theta_hat - theta_true, axis=-1)
    return float(np.sqrt(2.0) * slice_norms.sum())


def auc(theta_hat, support_mask):
    """Rank-based area under the detection curve, ties scored one half.

    Equals the brute-force frequency of |theta_hat| at active cells
    exceeding |theta_hat| at inactive cells over all such pairings.
    """
    scores = np.abs(np.asarray(theta_hat, dtype=float)).ravel()
    labels = np.asarray(support_mask, dtype=bool).ravel()
    if scores.shape != labels.shape:
        raise DimensionMismatch("score and mask shapes differ")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateMask("mask needs at least one active and one inactive cell")
    ranks = rankdata(scores)
    u_stat = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u_stat / (n_pos * n_neg))
