"""Synthetic benchmark generators with known time-varying network structure.

Two generators are provided, both producing p = 10 variables observed at 30
equally spaced time points on [0, 1] around the mean path mu(t) = t + sin(t).

Scenario 1 builds each subject's noise path as a B-spline mixture
e(t) = sum_s B_s(t) * xi_s with independent Gaussian loads xi_s ~ N(0,
Sigma_s), so the time-t covariance is sum_s B_s(t)^2 Sigma_s and one
subject's path is smooth in t. Every Sigma_s is a 2 x 2 block matrix with
all four p/2 x p/2 sub-blocks diagonal; this closure is preserved by
summation and inversion, so the true network has exactly the five edges
(1,6), (2,7), (3,8), (4,9), (5,10) wherever it is active.

Scenario 2 writes down unit-diagonal precision matrices directly: each of
the six edges (1,5), (1,8), (2,4), (2,6), (3,9), (7,10) carries +-f or +-g
(each with probability 1/4) on its own active time interval, where

    f(t) = (1/2) [0.1 + 0.8 sin(pi (t - Ts)/(Te - Ts))]
    g(t) = (1/2) [0.1 + 0.8 (t - Ts)/(Te - Ts)]

and both vanish off [Ts, Te]. The precision is symmetrized by averaging
with its transpose and the covariance is its inverse normalized to unit
diagonal. Draws are independent across time points.

Specs carry their realized random structure (covariances, interval shapes,
signs) so a serialized spec replays exactly.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .design import center_per_timepoint, n_pairs, pair_index
from .errors import ConstructionFailed, InvalidKnots, NotPositiveDefinite


def mean_path(t):
    return t + np.sin(t)


def bspline_basis(t_grid, n_basis=13):
    """Clamped cubic B-spline basis values on [0, 1], one row per grid point.

    The interior knots are the n_basis - 4 equally spaced points strictly
    inside [0, 1] (nine of them for the default thirteen bases).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if n_basis < 4:
        raise InvalidKnots("cubic splines need at least four basis functions")
    if t_grid.size == 0 or t_grid.min() < 0.0 or t_grid.max() > 1.0:
        raise InvalidKnots("evaluation points must lie in [0, 1]")
    knots = np.r_[np.zeros(3), np.linspace(0.0, 1.0, n_basis - 2), np.ones(3)]
    return BSpline.design_matrix(t_grid, knots, 3).toarray()


def true_partial_correlations(sigma_matrix):
    """Partial-correlation row (flat pair order) implied by one covariance matrix."""
    sigma_matrix = np.asarray(sigma_matrix, dtype=float)
    try:
        omega = np.linalg.inv(np.linalg.cholesky(sigma_matrix))
        omega = omega.T @ omega
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    d = np.sqrt(np.diag(omega))
    p = sigma_matrix.shape[0]
    out = np.empty(n_pairs(p))
    for i in range(1, p + 1):
        for j in range(i + 1, p + 1):
            out[pair_index(i, j, p)] = -omega[i - 1, j - 1] / (d[i - 1] * d[j - 1])
    return out


@dataclass
class SimulationTruth:
    """Ground-truth partial correlations and their exact support."""

    theta: np.ndarray  # (T, b)
    support: np.ndarray  # (T, b) bool, |theta| > 0
    edges: list  # 1-based (i, j) pairs that are ever active


# ---------------------------------------------------------------------------
# Scenario 1


@dataclass
class Scenario1Spec:
    p: int
    T: int
    n_basis: int
    seed: int
    covariances: np.ndarray  # (n_basis, p, p)

    @property
    def edges(self):
        half = self.p // 2
        return [(i, i + half) for i in range(1, half + 1)]

    def to_dict(self):
        return {
            "scenario": 1,
            "p": self.p,
            "T": self.T,
            "n_basis": self.n_basis,
            "seed": self.seed,
            "covariances": self.covariances.tolist(),
        }


def make_scenario1_spec(seed=0, p=10, T=30, n_basis=13, max_attempts=100):
    """Draw mixture covariances satisfying the structural constraints.

    Each Sigma_s has diagonal entries in [0.5, 1.5] and at most one coupling
    entry per edge, capped so its smallest eigenvalue stays at or above 0.1.
    Every edge is coupled only over a contiguous window of basis functions;
    with the local support of the bases this makes each true
    partial-correlation profile a hump that is exactly zero outside its
    window span, with staggered windows across edges. A draw is accepted
    once every edge's profile reaches magnitude 0.2 somewhere on the grid.
    """
    if p % 2 != 0:
        raise ValueError("scenario 1 needs an even variable count")
    rng = np.random.default_rng(seed)
    half = p // 2
    grid = np.linspace(0.0, 1.0, T)
    basis_sq = bspline_basis(grid, n_basis) ** 2

    window_width = 12
    starts = np.linspace(0, n_basis - window_width, half).round().astype(int)

    for _ in range(max_attempts):
        # One diagonal level per variable (shared across bases) and one
        # coupling level per edge keep the profiles flat-topped on the
        # window interior, rising and falling smoothly at its ends.
        diag = np.broadcast_to(rng.uniform(0.5, 1.5, size=p), (n_basis, p)).copy()
        gamma = np.broadcast_to(rng.uniform(0.5, 0.75, size=half), (n_basis, half)).copy()
        in_window = np.zeros((n_basis, half))
        for e in range(half):
            in_window[starts[e]:starts[e] + window_width, e] = 1.0
        edge_sign = rng.choice([-1.0, 1.0], size=half)
        d_lo, d_hi = diag[:, :half], diag[:, half:]
        mid = 0.5 * (d_lo + d_hi)
        gap = 0.5 * np.abs(d_lo - d_hi)
        c_max = np.sqrt((mid - 0.1) ** 2 - gap**2)
        coupling = edge_sign * in_window * np.minimum(gamma * np.sqrt(d_lo * d_hi), 0.97 * c_max)

        # rho_e(t) = c_e(t) / sqrt(a_e(t) b_e(t)) for the aggregated 2x2 blocks.
        a_t = basis_sq @ d_lo
        b_t = basis_sq @ d_hi
        c_t = basis_sq @ coupling
        rho = c_t / np.sqrt(a_t * b_t)
        if np.abs(rho).max(axis=0).min() < 0.2:
            continue

        covs = np.zeros((n_basis, p, p))
        rows = np.arange(half)
        for s in range(n_basis):
            np.fill_diagonal(covs[s], diag[s])
            covs[s][rows, rows + half] = coupling[s]
            covs[s][rows + half, rows] = coupling[s]
        return Scenario1Spec(p=p, T=T, n_basis=n_basis, seed=seed, covariances=covs)
    raise ConstructionFailed(f"no admissible covariance draw in {max_attempts} attempts")


def scenario1_covariances(seed=0):
    """The mixture covariance matrices for a given seed."""
    return make_scenario1_spec(seed=seed).covariances


def _scenario1_truth(spec):
    grid = np.linspace(0.0, 1.0, spec.T)
    basis_sq = bspline_basis(grid, spec.n_basis) ** 2
    half = spec.p // 2
    rows = np.arange(half)
    d_lo = spec.covariances[:, rows, rows]
    d_hi = spec.covariances[:, rows + half, rows + half]
    coupling = spec.covariances[:, rows, rows + half]
    a_t = basis_sq @ d_lo
    b_t = basis_sq @ d_hi
    c_t = basis_sq @ coupling
    rho = c_t / np.sqrt(a_t * b_t)

    theta = np.zeros((spec.T, n_pairs(spec.p)))
    for e, (i, j) in enumerate(spec.edges):
        theta[:, pair_index(i, j, spec.p)] = rho[:, e]
    return SimulationTruth(theta=theta, support=np.abs(theta) > 0, edges=spec.edges)


# ---------------------------------------------------------------------------
# Scenario 2

SCENARIO2_EDGES = [(1, 5), (1, 8), (2, 4), (2, 6), (3, 9), (7, 10)]


@dataclass
class Scenario2Spec:
    p: int
    T: int
    seed: int
    edges: list  # 1-based pairs
    intervals: np.ndarray  # (n_edges, 2) active [Ts, Te]
    shapes: list  # "f" (sine bump) or "g" (linear ramp) per edge
    signs: np.ndarray  # +-1 per edge

    def to_dict(self):
        return {
            "scenario": 2,
            "p": self.p,
            "T": self.T,
            "seed": self.seed,
            "edges": [list(e) for e in self.edges],
            "intervals": self.intervals.tolist(),
            "shapes": list(self.shapes),
            "signs": self.signs.tolist(),
        }


def _edge_profile(t, interval, shape):
    ts, te = interval
    if t < ts or t > te:
        return 0.0
    frac = (t - ts) / (te - ts)
    if shape == "f":
        return 0.5 * (0.1 + 0.8 * np.sin(np.pi * frac))
    return 0.5 * (0.1 + 0.8 * frac)


def make_scenario2_spec(seed=0, p=10, T=30, max_attempts=100):
    """Assign a shape/sign (each of +-f, +-g with probability 1/4) and an
    active window to every edge, redrawing if any grid precision fails to be
    positive definite."""
    rng = np.random.default_rng(seed)
    edges = list(SCENARIO2_EDGES)
    starts = np.linspace(0.0, 0.6, len(edges))
    intervals = np.column_stack([starts, starts + 0.4])
    grid = np.linspace(0.0, 1.0, T)

    for _ in range(max_attempts):
        picks = rng.integers(0, 4, size=len(edges))
        shapes = ["f" if c < 2 else "g" for c in picks]
        signs = np.where(picks % 2 == 0, 1.0, -1.0)
        spec = Scenario2Spec(
            p=p, T=T, seed=seed, edges=edges, intervals=intervals, shapes=shapes, signs=signs
        )
        try:
            for t in grid:
                scenario2_precision(t, spec)
        except NotPositiveDefinite:
            continue
        return spec
    raise ConstructionFailed(f"no positive-definite shape draw in {max_attempts} attempts")


def scenario2_precision(t, spec):
    """Precision and normalized covariance at one time point.

    Returns (Omega, Sigma) where Omega has unit diagonal and Sigma is the
    inverse of Omega rescaled to a correlation matrix.
    """
    p = spec.p
    omega = np.eye(p)
    for e, (i, j) in enumerate(spec.edges):
        val = spec.signs[e] * _edge_profile(t, spec.intervals[e], spec.shapes[e])
        omega[i - 1, j - 1] = val
        omega[j - 1, i - 1] = val
    omega = 0.5 * (omega + omega.T)
    try:
        inv = np.linalg.inv(np.linalg.cholesky(omega))
        sigma = inv.T @ inv
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(f"precision not positive definite at t={t}") from exc
    d = np.sqrt(np.diag(sigma))
    return omega, sigma / np.outer(d, d)


def _scenario2_truth(spec):
    grid = np.linspace(0.0, 1.0, spec.T)
    theta = np.zeros((spec.T, n_pairs(spec.p)))
    for e, (i, j) in enumerate(spec.edges):
        col = pair_index(i, j, spec.p)
        for k, t in enumerate(grid):
            # Unit-diagonal precision makes the partial correlation -Omega_ij.
            theta[k, col] = -spec.signs[e] * _edge_profile(t, spec.intervals[e], spec.shapes[e])
    return SimulationTruth(theta=theta, support=np.abs(theta) > 0, edges=list(spec.edges))


# ---------------------------------------------------------------------------
# Sampling


def scenario_truth(spec):
    """Ground-truth partial-correlation field of a scenario spec."""
    if isinstance(spec, Scenario1Spec):
        return _scenario1_truth(spec)
    return _scenario2_truth(spec)


def generate(spec, n, seed):
    """Draw n subjects from a scenario spec; returns (dataset, truth).

    The returned dataset is centered per time point. Scenario 1 draws one
    load vector per subject and basis function, so a subject's path is
    smooth and dependent across time; scenario 2 draws independently at
    each time point.
    """
    if n < 2:
        raise ValueError("need at least two subjects")
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 1.0, spec.T)
    mu = mean_path(grid)

    if isinstance(spec, Scenario1Spec):
        chols = np.linalg.cholesky(spec.covariances)
        draws = rng.standard_normal((n, spec.n_basis, spec.p))
        loads = np.einsum("sqp,nsp->nsq", chols, draws)
        basis = bspline_basis(grid, spec.n_basis)
        noise = np.einsum("ks,nsq->knq", basis, loads)
        raw = noise + mu[:, None, None]
    else:
        raw = np.empty((spec.T, n, spec.p))
        for k, t in enumerate(grid):
            _, sigma = scenario2_precision(t, spec)
            chol = np.linalg.cholesky(sigma)
            raw[k] = mu[k] + rng.standard_normal((n, spec.p)) @ chol.T

    dataset = center_per_timepoint(raw, time_grid=grid)
    return dataset, scenario_truth(spec)


def spec_from_dict(payload):
    """Rebuild a scenario spec from its JSON dictionary."""
    scenario = payload.get("scenario")
    if scenario == 1:
        return Scenario1Spec(
            p=int(payload["p"]),
            T=int(payload["T"]),
            n_basis=int(payload["n_basis"]),
            seed=int(payload["seed"]),
            covariances=np.asarray(payload["covariances"], dtype=float),
        )
    if scenario == 2:
        return Scenario2Spec(
            p=int(payload["p"]),
            T=int(payload["T"]),
            seed=int(payload["seed"]),
            edges=[tuple(e) for e in payload["edges"]],
            intervals=np.asarray(payload["intervals"], dtype=float),
            shapes=list(payload["shapes"]),
            signs=np.asarray(payload["signs"], dtype=float),
        )
    raise ValueError(f"unknown scenario tag {scenario!r}")


def make_spec(scenario, seed=0):
    """Factory for the two benchmark scenarios."""
    if scenario == 1:
        return make_scenario1_spec(seed=seed)
    if scenario == 2:
        return make_scenario2_spec(seed=seed)
    raise ValueError("scenario must be 1 or 2")
