"""Shared helpers for the test suite."""

import numpy as np

from hetdp import ExperimentConfig, MethodSpec, Statistic, Sweep, ThresholdStrategy

FIG1_EPSILONS = (10.0, 0.05, 0.1, 0.01, 0.25, 0.15)
FIG1_GROUP_SIZES = (100, 100, 500, 1000, 5000, 10000)
FIG1_BOUNDS = (-20.0, 20.0)
FIG1_SIGMA2 = 25.0


def fig1_config(sweep_values, trials, seed, methods=None) -> ExperimentConfig:
    """The six-group mean benchmark configuration with a swept first group."""
    if methods is None:
        methods = (
            MethodSpec.mixed(),
            MethodSpec.pdp_sample(ThresholdStrategy.minimum()),
            MethodSpec.pdp_sample(ThresholdStrategy.optimized()),
            MethodSpec.pdp_sample(ThresholdStrategy.average()),
            MethodSpec.pdp_sample(ThresholdStrategy.maximum()),
        )
    return ExperimentConfig(
        group_sizes=FIG1_GROUP_SIZES,
        epsilons=FIG1_EPSILONS,
        mu=0.0,
        sigma2=FIG1_SIGMA2,
        domain_bounds=FIG1_BOUNDS,
        trials=trials,
        seed=seed,
        statistic=Statistic.mean(),
        methods=tuple(methods),
        sweep=Sweep("n", tuple(sweep_values)),
    )


def max_log_ratio_excess(samples_a, samples_b, epsilon, n_bins=120, min_count=1000):
    """Worst histogram-bin violation of the privacy-loss bound, in nats.

    Bins where both sample sets have at least ``min_count`` draws are compared;
    for each, the absolute empirical log-density ratio is checked against
    epsilon plus three standard errors of the ratio estimate.  A non-positive
    return value means no bin exceeds the bound.
    """
    a = np.asarray(samples_a)
    b = np.asarray(samples_b)
    low = min(a.min(), b.min())
    high = max(a.max(), b.max())
    counts_a, edges = np.histogram(a, bins=n_bins, range=(low, high))
    counts_b, _ = np.histogram(b, bins=edges)
    mask = (counts_a >= min_count) & (counts_b >= min_count)
    assert mask.sum() >= 10, "too few well-populated bins for a meaningful ratio test"
    ca = counts_a[mask].astype(float)
    cb = counts_b[mask].astype(float)
    log_ratio = np.abs(np.log(ca / cb))
    slack = 3.0 * np.sqrt(1.0 / ca + 1.0 / cb)
    return float(np.max(log_ratio - (epsilon + slack)))
