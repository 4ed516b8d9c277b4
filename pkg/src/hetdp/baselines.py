"""The threshold-sampling baseline for heterogeneous privacy budgets.

Given a uniform threshold t, every point in group i is kept independently
with probability min(1, (e^eps_i - 1)/(e^t - 1)); the pooled survivors are fed
to a standard mechanism run at epsilon = t.  This preserves each group's own
budget while reusing ordinary single-epsilon mechanisms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, EmptyInputError, InvalidParameterError
from .estimators import Estimate, PrivacyGroup, is_public
from .mechanisms import DataDomain, RandomStream, exp_mech_quantile, sample_laplace

_KINDS = ("min", "average", "max", "optimized", "fixed")


@dataclass(frozen=True)
class ThresholdStrategy:
    """How the sampling threshold t is chosen from the group budgets."""

    kind: str
    t: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidParameterError(f"unknown threshold strategy {self.kind!r}")
        if self.kind == "fixed":
            if self.t is None or not (math.isfinite(self.t) and self.t > 0):
                raise InvalidParameterError(f"fixed threshold must be positive and finite, got {self.t!r}")
        elif self.t is not None:
            raise InvalidParameterError(f"strategy {self.kind!r} takes no threshold value")

    @classmethod
    def minimum(cls):
        return cls("min")

    @classmethod
    def average(cls):
        return cls("average")

    @classmethod
    def maximum(cls):
        return cls("max")

    @classmethod
    def optimized(cls):
        return cls("optimized")

    @classmethod
    def fixed(cls, t: float):
        return cls("fixed", float(t))


@dataclass(frozen=True)
class SampleOutcome:
    """Which points survived threshold sampling, and under which t."""

    included: tuple
    t: float
    sampled_counts: np.ndarray

    def __post_init__(self):
        counts = np.array([int(mask.sum()) for mask in self.included])
        if not np.array_equal(counts, self.sampled_counts):
            raise InvalidParameterError("sampled_counts disagree with the inclusion masks")

    @property
    def total_sampled(self) -> int:
        return int(self.sampled_counts.sum())


def inclusion_probability(epsilon, t: float) -> float:
    """Probability a point with budget epsilon is kept at threshold t.

    min(1, (e^epsilon - 1)/(e^t - 1)); public points are always kept.
    """
    if not (isinstance(t, (int, float, np.floating)) and math.isfinite(t) and t > 0):
        raise InvalidParameterError(f"threshold t must be positive and finite, got {t!r}")
    if is_public(epsilon):
        return 1.0
    return min(1.0, math.expm1(float(epsilon)) / math.expm1(float(t)))


def _finite_epsilons(groups) -> list[float]:
    return [float(g.epsilon) for g in groups if not is_public(g.epsilon)]


def select_threshold(strategy: ThresholdStrategy, groups, domain: DataDomain) -> float:
    """Resolve a threshold strategy to a concrete t for the given groups.

    Min and Average are taken over the declared finite epsilons (public groups
    are skipped); Max is undefined when a public group is present.  Optimized
    minimizes the predicted sampling variance over [min eps, max eps] by
    golden-section search to 1e-4 absolute.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("select_threshold needs at least one group")
    if strategy.kind == "fixed":
        return float(strategy.t)
    finite = _finite_epsilons(groups)
    if not finite:
        raise InvalidParameterError("no group has a finite epsilon to derive a threshold from")
    if strategy.kind == "min":
        return min(finite)
    if strategy.kind == "average":
        return sum(finite) / len(finite)
    if strategy.kind == "max":
        if len(finite) != len(groups):
            raise InvalidParameterError("max threshold is undefined with public groups present")
        return max(finite)
    # optimized
    from .analysis import golden_section_minimize, predicted_pdp_variance

    low, high = min(finite), max(finite)
    if low == high:
        return low
    return golden_section_minimize(
        lambda t: predicted_pdp_variance(groups, t, domain), low, high, tol=1e-4
    )


def sample_inclusion(groups, t: float, stream: RandomStream) -> SampleOutcome:
    """Draw per-point inclusion for every group; group i uses substream i."""
    groups = list(groups)
    if not groups:
        raise EmptyInputError("sample_inclusion needs at least one group")
    included = []
    for i, group in enumerate(groups):
        p = inclusion_probability(group.epsilon, t)
        if p >= 1.0:
            mask = np.ones(group.n, dtype=bool)
        else:
            mask = stream.substream(i).uniforms(group.n) < p
        included.append(mask)
    counts = np.array([int(mask.sum()) for mask in included])
    return SampleOutcome(tuple(included), float(t), counts)


def pdp_sample_mean(
    groups, strategy: ThresholdStrategy, domain: DataDomain, stream: RandomStream
) -> Estimate:
    """Release the pooled noisy mean of the threshold-sampled points.

    All survivors are pooled into one dataset of size N_s and
    (sum + Laplace(r/t)) / N_s is released, with the realized N_s as divisor.
    The variance at release time depends on the random N_s, so no closed form
    is attached; ``analysis.predicted_pdp_variance`` gives the expected-count
    approximation.  An empty sample aborts the trial.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("pdp_sample_mean needs at least one group")
    t = select_threshold(strategy, groups, domain)
    outcome = sample_inclusion(groups, t, stream)
    n_sampled = outcome.total_sampled
    if n_sampled == 0:
        raise DegenerateSampleError(f"threshold sampling at t={t} kept zero points")
    total = sum(
        float(domain.clamp(group.values)[mask].sum())
        for group, mask in zip(groups, outcome.included)
    )
    total += sample_laplace(stream.substream(len(groups)), domain.r / t)
    return Estimate(total / n_sampled, None)


def pdp_sample_quantile(
    groups, q: float, strategy: ThresholdStrategy, domain: DataDomain, stream: RandomStream
) -> Estimate:
    """Threshold-sample the groups, then release an epsilon=t quantile.

    The exponential mechanism runs on the pooled survivors at the threshold
    budget.  Stands in for a personalized exponential mechanism; any such
    mechanism can be swapped in behind this signature.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("pdp_sample_quantile needs at least one group")
    t = select_threshold(strategy, groups, domain)
    outcome = sample_inclusion(groups, t, stream)
    if outcome.total_sampled == 0:
        raise DegenerateSampleError(f"threshold sampling at t={t} kept zero points")
    pooled = np.concatenate(
        [np.asarray(group.values)[mask] for group, mask in zip(groups, outcome.included)]
    )
    value = exp_mech_quantile(pooled, q, t, domain, stream.substream(len(groups)))
    return Estimate(value, None)
