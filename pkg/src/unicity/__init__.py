"""Re-identifiability of set-valued data via uniform K-subset sampling.

The package measures *unicity*: the fraction of K-item subsets occurring
in a dataset that pinpoint exactly one record. It provides exact
brute-force oracles for small data, an unbiased Markov chain sampler
with convergence diagnostics for real data, Hoeffding-controlled sample
sizes, and an exponential decay model for extrapolating unicity to
larger populations.
"""

__version__ = "0.1.0"

from .dataset import (
    Dataset,
    DatasetStats,
    InvertedIndex,
    build_index,
    load_dataset,
)
from .errors import (
    BoundUndefinedError,
    EmptyDatasetError,
    EnumerationBudgetError,
    FitError,
    InsufficientDataError,
    InsufficientTraceError,
    InvalidSizeError,
    InvalidSpecError,
    NoEligibleRecordError,
    NotConvergedError,
    NotInDatasetError,
    RejectionBudgetError,
    UndefinedResultError,
    UnicityError,
    UnknownItemError,
)
from .estimator import (
    CurveSample,
    RadEstimator,
    RadHistogram,
    UnicityEstimate,
    UnicityEstimator,
    estimate_rad,
    estimate_unicity,
    homogeneity,
    sample_size_rad,
    sample_size_unicity,
    unicity_vs_size,
)
from .model import (
    ExponentialDecayModel,
    mean_abs_error,
    normalize_curve,
    split_train_test,
)
from .sampler import (
    ChainConfig,
    ChainState,
    EligibleView,
    biased_sample,
    draw_samples,
    estimate_h1_star,
    geweke_z,
    initial_state,
    mcmc_sample,
    mcmc_step,
    mixing_bound,
    q_weight,
    run_until_converged,
    uniform_k_subset,
)
from .synthgen import GenSpec, PAPER_SHAPED, describe, generate, paper_shaped
from . import oracle

__all__ = [
    "BoundUndefinedError",
    "ChainConfig",
    "ChainState",
    "CurveSample",
    "Dataset",
    "DatasetStats",
    "EligibleView",
    "EmptyDatasetError",
    "EnumerationBudgetError",
    "ExponentialDecayModel",
    "FitError",
    "GenSpec",
    "InsufficientDataError",
    "InsufficientTraceError",
    "InvalidSizeError",
    "InvalidSpecError",
    "InvertedIndex",
    "NoEligibleRecordError",
    "NotConvergedError",
    "NotInDatasetError",
    "PAPER_SHAPED",
    "RadEstimator",
    "RadHistogram",
    "RejectionBudgetError",
    "UndefinedResultError",
    "UnicityError",
    "UnicityEstimate",
    "UnicityEstimator",
    "UnknownItemError",
    "biased_sample",
    "build_index",
    "describe",
    "draw_samples",
    "estimate_h1_star",
    "estimate_rad",
    "estimate_unicity",
    "generate",
    "geweke_z",
    "homogeneity",
    "initial_state",
    "load_dataset",
    "mcmc_sample",
    "mcmc_step",
    "mean_abs_error",
    "mixing_bound",
    "normalize_curve",
    "oracle",
    "paper_shaped",
    "q_weight",
    "run_until_converged",
    "sample_size_rad",
    "sample_size_unicity",
    "split_train_test",
    "unicity_vs_size",
    "uniform_k_subset",
]
