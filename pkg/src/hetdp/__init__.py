"""Private estimation of means and quantiles over groups with heterogeneous privacy budgets.

Each group of users carries its own privacy parameter (possibly none at all
for public data).  The library releases a single statistic by combining
per-group private estimates with variance-minimizing weights, provides the
threshold-sampling baseline for comparison, and ships a seeded Monte-Carlo
harness that measures both.
"""

__version__ = "0.1.0"

from .analysis import (
    VarianceCurve,
    brute_force_optimal_weights,
    predicted_pdp_variance,
    subsampled_mean_variance,
    subsampling_variance_curve,
    threshold_variance_curve,
)
from .baselines import (
    SampleOutcome,
    ThresholdStrategy,
    inclusion_probability,
    pdp_sample_mean,
    pdp_sample_quantile,
    sample_inclusion,
    select_threshold,
)
from .errors import (
    DegenerateSampleError,
    EmptyInputError,
    InvalidParameterError,
    UnsupportedError,
)
from .estimators import (
    PUBLIC,
    Estimate,
    MixWeights,
    PrivacyGroup,
    Public,
    group_variance,
    is_public,
    joint_variance,
    mixed_mean,
    mixed_quantile,
    optimal_weights,
)
from .harness import (
    ExperimentConfig,
    MethodSpec,
    Statistic,
    Sweep,
    TrialStats,
    generate_groups,
    read_results_csv,
    run_experiment,
    write_results_csv,
)
from .mechanisms import (
    DataDomain,
    LaplaceNoise,
    RandomStream,
    amplified_epsilon,
    derive_stream_id,
    exact_quantile,
    exp_mech_quantile,
    laplace_inverse_cdf,
    quantile_interval_probabilities,
    sample_laplace,
    sample_laplace_vector,
)

__all__ = [
    "PUBLIC",
    "DataDomain",
    "DegenerateSampleError",
    "EmptyInputError",
    "Estimate",
    "ExperimentConfig",
    "InvalidParameterError",
    "LaplaceNoise",
    "MethodSpec",
    "MixWeights",
    "PrivacyGroup",
    "Public",
    "RandomStream",
    "SampleOutcome",
    "Statistic",
    "Sweep",
    "ThresholdStrategy",
    "TrialStats",
    "UnsupportedError",
    "VarianceCurve",
    "amplified_epsilon",
    "brute_force_optimal_weights",
    "derive_stream_id",
    "exact_quantile",
    "exp_mech_quantile",
    "generate_groups",
    "group_variance",
    "inclusion_probability",
    "is_public",
    "joint_variance",
    "laplace_inverse_cdf",
    "mixed_mean",
    "mixed_quantile",
    "optimal_weights",
    "pdp_sample_mean",
    "pdp_sample_quantile",
    "predicted_pdp_variance",
    "quantile_interval_probabilities",
    "read_results_csv",
    "run_experiment",
    "sample_inclusion",
    "sample_laplace",
    "sample_laplace_vector",
    "select_threshold",
    "subsampled_mean_variance",
    "subsampling_variance_curve",
    "threshold_variance_curve",
    "write_results_csv",
]
