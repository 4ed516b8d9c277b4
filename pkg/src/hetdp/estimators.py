"""Minimum-variance mixed estimators for groups with heterogeneous privacy budgets.

Each group gets its own private estimate at its own epsilon; the release is a
convex combination with weights inversely proportional to the per-group
variances, which minimizes the variance of the combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InvalidParameterError
from .mechanisms import (
    DataDomain,
    RandomStream,
    exact_quantile,
    exp_mech_quantile,
    sample_laplace,
)


class Public:
    """Marker for a group with no privacy requirement.

    Used instead of a floating-point infinity so that no noise-scale
    arithmetic ever sees an infinite epsilon.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "PUBLIC"


PUBLIC = Public()


def is_public(epsilon) -> bool:
    return isinstance(epsilon, Public)


def check_epsilon(epsilon) -> None:
    """Validate a group privacy parameter: PUBLIC or a finite positive real."""
    if is_public(epsilon):
        return
    if not (isinstance(epsilon, (int, float, np.floating)) and math.isfinite(epsilon) and epsilon > 0):
        raise InvalidParameterError(f"epsilon must be PUBLIC or a positive finite real, got {epsilon!r}")


@dataclass(frozen=True)
class PrivacyGroup:
    """One group's data values plus its privacy requirement.

    Each value is one user's single data point.  The group size ``n`` is
    treated as public knowledge.
    """

    values: np.ndarray
    epsilon: object  # PUBLIC or positive float

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or self.values.size == 0:
            raise EmptyInputError("a privacy group needs a non-empty 1-D array of values")
        check_epsilon(self.epsilon)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def total(self) -> float:
        """Sum of the group's values."""
        return float(self.values.sum())


@dataclass(frozen=True)
class MixWeights:
    """Normalized convex-combination weights, aligned with the group list."""

    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "beta", np.asarray(self.beta, dtype=float))
        if self.beta.ndim != 1 or self.beta.size == 0:
            raise EmptyInputError("weights need a non-empty 1-D array")
        if np.any(self.beta < 0):
            raise InvalidParameterError("weights must be non-negative")
        if abs(float(self.beta.sum()) - 1.0) > 1e-12:
            raise InvalidParameterError(f"weights must sum to 1, got {self.beta.sum()!r}")

    def __len__(self) -> int:
        return self.beta.size


@dataclass(frozen=True)
class Estimate:
    """A released statistic and, when known in closed form, its variance."""

    value: float
    theoretical_variance: float | None = None

    def __post_init__(self):
        if self.theoretical_variance is not None:
            tv = self.theoretical_variance
            if not (math.isfinite(tv) and tv >= 0):
                raise InvalidParameterError(f"theoretical_variance must be finite and >= 0, got {tv!r}")


def group_variance(group: PrivacyGroup, domain: DataDomain) -> float:
    """Variance of one group's Laplace-noised mean: (n*sigma2 + 2r^2/eps^2) / n^2.

    For a public group the noise term vanishes, leaving sigma2/n.
    """
    n = group.n
    if is_public(group.epsilon):
        return domain.sigma2 / n
    noise = 2.0 * domain.r ** 2 / float(group.epsilon) ** 2
    return (n * domain.sigma2 + noise) / (n * n)


def optimal_weights(groups, domain: DataDomain) -> MixWeights:
    """Inverse-variance weights, normalized to sum to 1.

    The convex combination of independent unbiased estimates has minimum
    variance when each weight is proportional to 1/variance.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("optimal_weights needs at least one group")
    raw = np.array([1.0 / group_variance(g, domain) for g in groups])
    return MixWeights(raw / raw.sum())


def joint_variance(weights: MixWeights, groups, domain: DataDomain) -> float:
    """Variance of the weighted combination: sum of beta_i^2 * Var_i."""
    groups = list(groups)
    if len(weights) != len(groups):
        raise InvalidParameterError(f"{len(weights)} weights for {len(groups)} groups")
    variances = np.array([group_variance(g, domain) for g in groups])
    return float(np.sum(weights.beta ** 2 * variances))


def mixed_mean(groups, domain: DataDomain, stream: RandomStream) -> Estimate:
    """Release the optimally weighted combination of per-group noisy means.

    Group i contributes (sum_i + z_i)/n_i with z_i ~ Laplace(r/eps_i); public
    groups contribute their exact mean.  Groups are disjoint, so each runs at
    its own epsilon (parallel composition).  Group i's noise comes from
    substream i of ``stream``, making the draws independent and reproducible.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("mixed_mean needs at least one group")
    weights = optimal_weights(groups, domain)
    value = 0.0
    for i, (group, beta) in enumerate(zip(groups, weights.beta)):
        total = float(domain.clamp(group.values).sum())
        if not is_public(group.epsilon):
            total += sample_laplace(stream.substream(i), domain.r / float(group.epsilon))
        value += beta * total / group.n
    return Estimate(float(value), joint_variance(weights, groups, domain))


def mixed_quantile(groups, q: float, domain: DataDomain, stream: RandomStream) -> Estimate:
    """Combine per-group quantile releases under the mean-derived weights.

    Private groups use the exponential mechanism at their own epsilon; public
    groups use the exact sample quantile (the infinite-epsilon limit).  The
    weights are the ones optimized for means; no variance formula is known
    for the combination, so ``theoretical_variance`` is left unknown.
    """
    groups = list(groups)
    if not groups:
        raise EmptyInputError("mixed_quantile needs at least one group")
    weights = optimal_weights(groups, domain)
    value = 0.0
    for i, (group, beta) in enumerate(zip(groups, weights.beta)):
        if is_public(group.epsilon):
            estimate = exact_quantile(group.values, q)
        else:
            estimate = exp_mech_quantile(
                group.values, q, float(group.epsilon), domain, stream.substream(i)
            )
        value += beta * estimate
    return Estimate(float(value), None)
