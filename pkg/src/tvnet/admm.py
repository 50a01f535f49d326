"""Shared pieces of the consensus-splitting solvers.

Both penalized estimators are minimized by the same alternating scheme on
the split theta = z: a quadratic theta-update, a proximal z-update, and a
scaled dual ascent u <- u + theta - z. The modules for the two penalties
differ only in the linear system of the theta-update and in the proximal
map; the config, state record and stopping rule live here.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class AdmmConfig:
    """Penalty parameter and stopping thresholds for the inner solver.

    Convergence combines absolute and relative parts in the standard way:
    the primal residual ||theta - z|| must fall below
    sqrt(N)*eps_abs + eps_rel*max(||theta||, ||z||) and the dual residual
    a*||z - z_old|| below sqrt(N)*eps_abs + eps_rel*||a u||.
    """

    a: float = 1.0
    max_iter: int = 2000
    eps_abs: float = 1e-6
    eps_rel: float = 1e-4

    def __post_init__(self):
        if self.a <= 0:
            raise ValueError("penalty parameter a must be positive")
        if self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class AdmmState:
    """Final iterates and residual history of one inner solve."""

    theta: np.ndarray
    z: np.ndarray
    u: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    converged: bool
    primal_history: list = field(default_factory=list)
    dual_history: list = field(default_factory=list)


def soft_threshold(v, kappa):
    """Elementwise shrinkage sign(v) * max(|v| - kappa, 0); exact zeros inside the dead zone."""
    if kappa < 0:
        raise ValueError("threshold must be nonnegative")
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


def residual_bounds(theta, z, u, a, cfg):
    """Primal and dual stopping thresholds for the current iterates."""
    root_n = np.sqrt(theta.size)
    eps_pri = root_n * cfg.eps_abs + cfg.eps_rel * max(np.linalg.norm(theta), np.linalg.norm(z))
    eps_dual = root_n * cfg.eps_abs + cfg.eps_rel * a * np.linalg.norm(u)
    return eps_pri, eps_dual
