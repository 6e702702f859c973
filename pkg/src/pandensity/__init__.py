"""User-level pan-private stream density estimation.

Three estimators (conventional static sampling, budget-tight Bernoulli
tuning, and pan-private distinct sampling), closed-form and numerically
tuned accuracy bounds, synthetic stream generation, and a reproducible
Monte-Carlo experiment harness with CSV + figure output.
"""

from .bounds import (
    BoundResult,
    DeltaPoint,
    beta_bound,
    mse_bound,
    optimal_sample_size,
    ppds_mse_bound,
    sample_size_terms,
    tightest_beta,
)
from .distinct_sampling import FmHashParams, PpdsEstimator, hash_level, new_fm_hash, trailing_zeros
from .estimators import DensityEstimate, StaticEstimator, Variant, sample_without_replacement
from .harness import (
    CSV_HEADER,
    ExperimentConfig,
    ExperimentResult,
    ResultRow,
    derive_seed,
    load_config,
    run_experiment,
    run_trial,
    write_csv,
)
from .mechanisms import (
    BernoulliPair,
    NoiseSource,
    PrivacyBudget,
    actual_budget,
    bernoulli_sample,
    laplace_sample,
    make_dwork_pair,
    make_optimal_pair,
    state_privacy_ratios,
)
from .streamgen import Stream, StreamSpec, generate, read_stream, true_density, write_stream

__version__ = "0.1.0"

__all__ = [
    "CSV_HEADER",
    "BernoulliPair",
    "BoundResult",
    "DeltaPoint",
    "DensityEstimate",
    "ExperimentConfig",
    "ExperimentResult",
    "FmHashParams",
    "NoiseSource",
    "PpdsEstimator",
    "PrivacyBudget",
    "ResultRow",
    "StaticEstimator",
    "Stream",
    "StreamSpec",
    "Variant",
    "actual_budget",
    "bernoulli_sample",
    "beta_bound",
    "derive_seed",
    "generate",
    "hash_level",
    "laplace_sample",
    "load_config",
    "make_dwork_pair",
    "make_optimal_pair",
    "mse_bound",
    "new_fm_hash",
    "optimal_sample_size",
    "ppds_mse_bound",
    "read_stream",
    "run_experiment",
    "run_trial",
    "sample_size_terms",
    "sample_without_replacement",
    "state_privacy_ratios",
    "tightest_beta",
    "trailing_zeros",
    "true_density",
    "write_csv",
    "write_stream",
]
