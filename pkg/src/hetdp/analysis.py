"""Closed-form variance analysis and brute-force reference minimizers.

Covers the subsampled-mean variance decomposition (which shows subsampling
never helps a private mean), the expected-count variance of the threshold
sampling baseline as a function of t, and an exhaustive simplex-grid weight
minimizer used as a test oracle for the closed-form weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import inclusion_probability
from .errors import InvalidParameterError, UnsupportedError
from .mechanisms import DataDomain, amplified_epsilon

_GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class VarianceCurve:
    """A variance profile over a named parameter grid."""

    parameter: str
    grid: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=float))
        object.__setattr__(self, "variance", np.asarray(self.variance, dtype=float))
        if self.grid.size != self.variance.size:
            raise InvalidParameterError("grid and variance lists must have equal length")
        if self.grid.size == 0 or np.any(np.diff(self.grid) <= 0):
            raise InvalidParameterError("grid must be non-empty and strictly increasing")
        if not np.all(np.isfinite(self.variance)):
            raise InvalidParameterError("variances must all be finite")

    def argmin(self) -> float:
        return float(self.grid[int(np.argmin(self.variance))])


def subsampled_mean_variance(
    m: int,
    p: float,
    sigma2: float,
    r: float,
    epsilon: float,
    use_amplification: bool = False,
) -> float:
    """Variance of a Laplace-noised mean computed on a p-subsample of m points.

    With the generous epsilon/p noise parameter the decomposition is
    sigma2/(m*p) + 2*r^2/(epsilon^2 * m^2): the noise term does not depend on
    p at all, so p = 1 is always optimal.  With ``use_amplification`` the
    tighter ln(1 + (1/p)(e^eps - 1)) parameter replaces epsilon/p, which only
    increases the variance for p < 1.
    """
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f"subsampling rate p must lie in (0, 1], got {p!r}")
    if m < 1:
        raise InvalidParameterError(f"m must be at least 1, got {m}")
    kept = m * p
    if use_amplification:
        eps_eff = amplified_epsilon(epsilon, p)
        noise = 2.0 * (r / eps_eff) ** 2 / kept**2
    else:
        noise = 2.0 * r * r / (epsilon * epsilon * m * m)
    return sigma2 / kept + noise


def predicted_pdp_variance(groups, t: float, domain: DataDomain) -> float:
    """Expected-count variance of the threshold-sampling mean at threshold t.

    Plugs the expected sample sizes n_i * p_i into the pooled-mean variance:
    (sum_i n_i p_i sigma2 + 2 r^2 / t^2) / (sum_i n_i p_i)^2.  This is the
    smooth objective the optimized threshold strategy minimizes; the exact
    variance over the random sample size is available by Monte Carlo through
    the harness.
    """
    groups = list(groups)
    expected = sum(g.n * inclusion_probability(g.epsilon, t) for g in groups)
    if expected <= 0:
        raise InvalidParameterError("expected sample size is zero; no variance is defined")
    noise = 2.0 * (domain.r / t) ** 2
    return (expected * domain.sigma2 + noise) / expected**2


def golden_section_minimize(f, a: float, b: float, tol: float = 1e-4) -> float:
    """Golden-section search for the minimizer of f on [a, b]."""
    if not (a <= b):
        raise InvalidParameterError(f"need a <= b, got [{a}, {b}]")
    c = b - (b - a) / _GOLDEN
    d = a + (b - a) / _GOLDEN
    while abs(c - d) > tol:
        if f(c) < f(d):
            b = d
        else:
            a = c
        c = b - (b - a) / _GOLDEN
        d = a + (b - a) / _GOLDEN
    return (a + b) / 2.0


def brute_force_optimal_weights(group_variances, grid_resolution: int):
    """Exhaustive simplex-grid minimizer of sum(beta_i^2 * Var_i).

    Test oracle for the closed-form inverse-variance weights; supports 2 or 3
    groups only.  Returns the best grid point as an array of weights.
    """
    variances = np.asarray(group_variances, dtype=float)
    if np.any(variances <= 0) or not np.all(np.isfinite(variances)):
        raise InvalidParameterError("group variances must be positive and finite")
    if grid_resolution < 100:
        raise InvalidParameterError(f"grid_resolution must be at least 100, got {grid_resolution}")
    k = variances.size
    if k == 2:
        beta0 = np.linspace(0.0, 1.0, grid_resolution + 1)
        objective = beta0**2 * variances[0] + (1.0 - beta0) ** 2 * variances[1]
        best = float(beta0[int(np.argmin(objective))])
        return np.array([best, 1.0 - best])
    if k == 3:
        resolution = int(grid_resolution)
        best_value = math.inf
        best_point = None
        # row-chunked scan of the simplex lattice (i + j <= resolution)
        for i in range(resolution + 1):
            b0 = i / resolution
            j = np.arange(resolution - i + 1)
            b1 = j / resolution
            b2 = 1.0 - b0 - b1
            objective = b0 * b0 * variances[0] + b1 * b1 * variances[1] + b2 * b2 * variances[2]
            jj = int(np.argmin(objective))
            if objective[jj] < best_value:
                best_value = float(objective[jj])
                best_point = np.array([b0, b1[jj], b2[jj]])
        return best_point
    raise UnsupportedError(f"brute-force weight search supports 2 or 3 groups, got {k}")


def subsampling_variance_curve(
    m: int, sigma2: float, r: float, epsilon: float, p_grid, use_amplification: bool = False
) -> VarianceCurve:
    """Variance profile over a grid of subsampling rates."""
    grid = np.asarray(p_grid, dtype=float)
    values = [subsampled_mean_variance(m, p, sigma2, r, epsilon, use_amplification) for p in grid]
    return VarianceCurve("p", grid, np.array(values))


def threshold_variance_curve(groups, domain: DataDomain, t_grid) -> VarianceCurve:
    """Predicted sampling-baseline variance profile over a grid of thresholds."""
    grid = np.asarray(t_grid, dtype=float)
    values = [predicted_pdp_variance(groups, t, domain) for t in grid]
    return VarianceCurve("t", grid, np.array(values))
