"""Sparse, smoothly time-varying partial-correlation network estimation.

Estimates per-time-point partial-correlation networks from panels of
multivariate Gaussian observations, encouraging sparsity within each time
point and similarity across neighboring time points via either a squared
(gen) or absolute (gfl) penalty on temporal differences, with
degrees-of-freedom-based criterion tuning, synthetic benchmark generators,
and evaluation metrics.
"""

from .admm import AdmmConfig, AdmmState, soft_threshold
from .design import (
    StackedDesign,
    TemporalDataset,
    build_design,
    center_per_timepoint,
    n_pairs,
    pair_index,
    pair_list,
    sample_covariance,
)
from .flsa import flsa_1d, flsa_batch, tv_denoise
from .linalg import (
    BlockTridiagFactorization,
    BlockTridiagSystem,
    block_tridiag_factorize,
    block_tridiag_solve,
    log_det_pd,
    sym_solve,
)
from .metrics import auc, estimation_error
from .outer import FitResult, OuterConfig, fit, init_sigma, sample_partial_correlations, update_sigma
from .select import BicSurface, DfConfig, bic, df_gen, df_gfl, grid_search, precision_from_fit
from .simulate import (
    Scenario1Spec,
    Scenario2Spec,
    SimulationTruth,
    bspline_basis,
    generate,
    make_spec,
    scenario_truth,
    scenario1_covariances,
    scenario2_precision,
    true_partial_correlations,
)
from .solver_gen import solve_gen
from .solver_gfl import solve_gfl

__version__ = "0.1.0"
