"""Monte-Carlo experiment engine.

Generates synthetic grouped data, runs the mixed and threshold-sampling
estimators over many independent trials, and reduces the per-trial releases
to variance / RMSE rows with bootstrap confidence intervals.  Trials are
keyed by (sweep index, method index, trial id) substreams, so results do not
depend on execution order and identical configs reproduce identical files.
"""

from __future__ import annotations

import csv
import math
import statistics as _statistics
from dataclasses import dataclass, replace

import numpy as np

from .baselines import ThresholdStrategy, pdp_sample_mean, pdp_sample_quantile, select_threshold
from .errors import DegenerateSampleError, EmptyInputError, InvalidParameterError
from .estimators import (
    PUBLIC,
    PrivacyGroup,
    check_epsilon,
    is_public,
    joint_variance,
    mixed_mean,
    mixed_quantile,
    optimal_weights,
)
from .mechanisms import DataDomain, RandomStream, exact_quantile

CSV_HEADER = (
    "method",
    "sweep_param",
    "sweep_value",
    "trials",
    "failures",
    "emp_variance",
    "rmse",
    "ci95_low",
    "ci95_high",
    "theoretical_variance",
)

BOOTSTRAP_RESAMPLES = 2000

# top-level substream purposes under the experiment seed
_DATA, _METHOD, _BOOT = 0, 1, 2

_SWEEP_NAMES = ("n", "low_privacy_share")


@dataclass(frozen=True)
class Statistic:
    """Which statistic an experiment releases: the mean, or a quantile q."""

    kind: str
    q: float | None = None

    def __post_init__(self):
        if self.kind == "mean":
            if self.q is not None:
                raise InvalidParameterError("the mean statistic takes no quantile level")
        elif self.kind == "quantile":
            if self.q is None or not (0.0 < self.q < 1.0):
                raise InvalidParameterError(f"quantile level must lie in (0, 1), got {self.q!r}")
        else:
            raise InvalidParameterError(f"unknown statistic {self.kind!r}")

    @classmethod
    def mean(cls):
        return cls("mean")

    @classmethod
    def quantile(cls, q: float):
        return cls("quantile", float(q))


@dataclass(frozen=True)
class MethodSpec:
    """An estimator to benchmark: the mixed estimator, or threshold sampling."""

    kind: str
    strategy: ThresholdStrategy | None = None

    def __post_init__(self):
        if self.kind == "mixed":
            if self.strategy is not None:
                raise InvalidParameterError("the mixed method takes no threshold strategy")
        elif self.kind == "pdp_sample":
            if self.strategy is None:
                raise InvalidParameterError("pdp_sample needs a threshold strategy")
        else:
            raise InvalidParameterError(f"unknown method {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "mixed":
            return "mixed"
        if self.strategy.kind == "fixed":
            return f"pdp_sample_fixed_{self.strategy.t:g}"
        return f"pdp_sample_{self.strategy.kind}"

    @classmethod
    def mixed(cls):
        return cls("mixed")

    @classmethod
    def pdp_sample(cls, strategy: ThresholdStrategy):
        return cls("pdp_sample", strategy)


@dataclass(frozen=True)
class Sweep:
    """A named parameter swept over a grid of values.

    ``n`` sweeps the size of the first group; ``low_privacy_share`` keeps the
    total size of a two-group configuration fixed and moves the given share
    of points into the group with the loosest privacy requirement.
    """

    name: str
    values: tuple

    def __post_init__(self):
        if self.name not in _SWEEP_NAMES:
            raise InvalidParameterError(f"unknown sweep parameter {self.name!r}")
        if not self.values:
            raise InvalidParameterError("sweep needs at least one value")
        for v in self.values:
            if self.name == "n" and (int(v) != v or v < 1):
                raise InvalidParameterError(f"swept group size must be a positive integer, got {v!r}")
            if self.name == "low_privacy_share" and not (0.0 < v < 1.0):
                raise InvalidParameterError(f"low-privacy share must lie in (0, 1), got {v!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one Monte-Carlo experiment."""

    group_sizes: tuple
    epsilons: tuple
    mu: float
    sigma2: float
    domain_bounds: tuple
    trials: int
    seed: int
    statistic: Statistic
    methods: tuple
    sweep: Sweep | None = None
    rmse_reference: str = "population"

    def __post_init__(self):
        if len(self.group_sizes) == 0:
            raise EmptyInputError("experiment needs at least one group")
        if len(self.group_sizes) != len(self.epsilons):
            raise InvalidParameterError("group_sizes and epsilons must have equal length")
        for n in self.group_sizes:
            if int(n) != n or n < 1:
                raise InvalidParameterError(f"group sizes must be positive integers, got {n!r}")
        for eps in self.epsilons:
            check_epsilon(eps)
        a, b = self.domain_bounds
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise InvalidParameterError(f"domain bounds must be finite with a < b, got {self.domain_bounds!r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 >= 0):
            raise InvalidParameterError(f"sigma2 must be non-negative and finite, got {self.sigma2!r}")
        if self.trials < 1:
            raise InvalidParameterError(f"trials must be at least 1, got {self.trials}")
        if not (0 <= self.seed < 2**64):
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not self.methods:
            raise EmptyInputError("experiment needs at least one method")
        if self.rmse_reference not in ("population", "sample"):
            raise InvalidParameterError(f"rmse_reference must be population or sample, got {self.rmse_reference!r}")
        if self.sweep is not None and self.sweep.name == "low_privacy_share" and len(self.group_sizes) != 2:
            raise InvalidParameterError("the low_privacy_share sweep needs exactly two groups")

    @property
    def domain(self) -> DataDomain:
        return DataDomain(self.domain_bounds[0], self.domain_bounds[1], self.sigma2)


@dataclass
class TrialStats:
    """Aggregated Monte-Carlo results for one (method, sweep value) cell."""

    method: str
    sweep_param: str
    sweep_value: float
    trials: int
    failures: int
    emp_variance: float
    rmse: float
    ci95_low: float
    ci95_high: float
    theoretical_variance: float | None

    def __post_init__(self):
        if self.failures > self.trials:
            raise InvalidParameterError("more failures than trials")


def _effective_epsilon(eps) -> float:
    return math.inf if is_public(eps) else float(eps)


def _sweep_cells(config: ExperimentConfig):
    """Yield (cell_config, sweep_param, sweep_value) for every sweep point."""
    if config.sweep is None:
        yield config, "none", 0.0
        return
    if config.sweep.name == "n":
        for value in config.sweep.values:
            sizes = (int(value),) + tuple(config.group_sizes[1:])
            yield replace(config, group_sizes=sizes, sweep=None), "n", float(value)
        return
    # low_privacy_share over a fixed two-group total
    total = int(sum(config.group_sizes))
    low_index = max(range(2), key=lambda i: _effective_epsilon(config.epsilons[i]))
    for share in config.sweep.values:
        n_low = min(max(int(round(share * total)), 1), total - 1)
        sizes = [0, 0]
        sizes[low_index] = n_low
        sizes[1 - low_index] = total - n_low
        yield replace(config, group_sizes=tuple(sizes), sweep=None), "low_privacy_share", float(share)


def generate_groups(config: ExperimentConfig, trial_id: int, stream: RandomStream):
    """Draw one trial's synthetic groups: normal(mu, sigma2) clamped to the bounds.

    Group i's data comes from substream (trial_id, i), so regenerating any
    trial is independent of how many trials ran before it.
    """
    a, b = config.domain_bounds
    sigma = math.sqrt(config.sigma2)
    groups = []
    for i, (n, eps) in enumerate(zip(config.group_sizes, config.epsilons)):
        values = stream.substream(trial_id, i).normals(config.mu, sigma, int(n))
        groups.append(PrivacyGroup(np.clip(values, a, b), eps))
    return groups


def _population_truth(config: ExperimentConfig) -> float:
    if config.statistic.kind == "mean":
        return config.mu
    if config.sigma2 == 0:
        return config.mu
    dist = _statistics.NormalDist(config.mu, math.sqrt(config.sigma2))
    return dist.inv_cdf(config.statistic.q)


def _sample_truth(config: ExperimentConfig, groups) -> float:
    pooled = np.concatenate([g.values for g in groups])
    if config.statistic.kind == "mean":
        return float(pooled.mean())
    return exact_quantile(pooled, config.statistic.q)


def _resolve_methods(config: ExperimentConfig, groups_template, domain: DataDomain):
    """Pin threshold strategies to their concrete t for this sweep cell.

    The threshold depends only on group sizes and epsilons, which are fixed
    within a cell, so it is resolved once instead of once per trial.
    """
    resolved = []
    for method in config.methods:
        if method.kind == "pdp_sample":
            t = select_threshold(method.strategy, groups_template, domain)
            resolved.append((method.label, MethodSpec.pdp_sample(ThresholdStrategy.fixed(t))))
        else:
            resolved.append((method.label, method))
    return resolved


def _apply_method(method: MethodSpec, config: ExperimentConfig, groups, domain, stream):
    if method.kind == "mixed":
        if config.statistic.kind == "mean":
            return mixed_mean(groups, domain, stream)
        return mixed_quantile(groups, config.statistic.q, domain, stream)
    if config.statistic.kind == "mean":
        return pdp_sample_mean(groups, method.strategy, domain, stream)
    return pdp_sample_quantile(groups, config.statistic.q, method.strategy, domain, stream)


def _bootstrap_ci(samples: np.ndarray, stat, stream: RandomStream, resamples: int = BOOTSTRAP_RESAMPLES):
    """Nonparametric percentile bootstrap 95% interval for stat(samples)."""
    n = samples.size
    if n < 2:
        return math.nan, math.nan
    out = np.empty(resamples)
    # cap index-matrix memory at a few million entries per chunk
    chunk = max(1, min(resamples, int(4_000_000 // n)))
    done = 0
    while done < resamples:
        count = min(chunk, resamples - done)
        idx = stream.integers(0, n, (count, n))
        out[done : done + count] = stat(samples[idx])
        done += count
    low, high = np.percentile(out, [2.5, 97.5])
    return float(low), float(high)


def run_experiment(config: ExperimentConfig):
    """Run every (sweep value, method) cell for ``config.trials`` trials.

    Returns TrialStats rows sorted by (method, sweep_value).  Empirical
    variance is the dispersion of the released estimates; RMSE is measured
    against the population statistic (or the realized sample statistic when
    ``rmse_reference = "sample"``).  Degenerate-sample failures are counted
    and excluded from the moments.  The 95% interval covers the variance for
    mean experiments and the RMSE for quantile experiments.
    """
    base = RandomStream(config.seed)
    rows = []
    for s_idx, (cell, sweep_param, sweep_value) in enumerate(_sweep_cells(config)):
        domain = cell.domain
        template = [PrivacyGroup(np.zeros(int(n)), eps) for n, eps in zip(cell.group_sizes, cell.epsilons)]
        resolved = _resolve_methods(cell, template, domain)
        theoretical = [
            joint_variance(optimal_weights(template, domain), template, domain)
            if method.kind == "mixed" and cell.statistic.kind == "mean"
            else None
            for _, method in resolved
        ]
        estimates = [[] for _ in resolved]
        truths = [[] for _ in resolved]
        failures = [0] * len(resolved)
        data_root = base.substream(_DATA, s_idx)
        population_truth = _population_truth(cell)
        for trial in range(cell.trials):
            groups = generate_groups(cell, trial, data_root)
            truth = (
                population_truth
                if cell.rmse_reference == "population"
                else _sample_truth(cell, groups)
            )
            for m_idx, (_, method) in enumerate(resolved):
                stream = base.substream(_METHOD, s_idx, m_idx, trial)
                try:
                    released = _apply_method(method, cell, groups, domain, stream)
                except DegenerateSampleError:
                    failures[m_idx] += 1
                    continue
                estimates[m_idx].append(released.value)
                truths[m_idx].append(truth)
        for m_idx, (label, _) in enumerate(resolved):
            values = np.asarray(estimates[m_idx])
            errors = values - np.asarray(truths[m_idx])
            if values.size >= 2:
                emp_variance = float(np.var(values, ddof=1))
            else:
                emp_variance = math.nan
            rmse = float(np.sqrt(np.mean(errors**2))) if values.size else math.nan
            boot_stream = base.substream(_BOOT, s_idx, m_idx)
            if cell.statistic.kind == "mean":
                ci = _bootstrap_ci(values, lambda s: np.var(s, axis=1, ddof=1), boot_stream)
            else:
                ci = _bootstrap_ci(errors**2, lambda s: np.sqrt(np.mean(s, axis=1)), boot_stream)
            rows.append(
                TrialStats(
                    method=label,
                    sweep_param=sweep_param,
                    sweep_value=sweep_value,
                    trials=cell.trials,
                    failures=failures[m_idx],
                    emp_variance=emp_variance,
                    rmse=rmse,
                    ci95_low=ci[0],
                    ci95_high=ci[1],
                    theoretical_variance=theoretical[m_idx],
                )
            )
    rows.sort(key=lambda row: (row.method, row.sweep_value))
    return rows


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % value


def write_results_csv(rows, path) -> None:
    """Serialize TrialStats to the result-file contract.

    Fixed header, floats at 17 significant digits, rows sorted by
    (method, sweep_value); byte-identical for identical inputs.
    """
    ordered = sorted(rows, key=lambda row: (row.method, row.sweep_value))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in ordered:
            writer.writerow(
                [
                    row.method,
                    row.sweep_param,
                    _format_value(row.sweep_value),
                    _format_value(row.trials),
                    _format_value(row.failures),
                    _format_value(row.emp_variance),
                    _format_value(row.rmse),
                    _format_value(row.ci95_low),
                    _format_value(row.ci95_high),
                    _format_value(row.theoretical_variance),
                ]
            )


def read_results_csv(path):
    """Parse a result file back into TrialStats rows."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidParameterError(f"unexpected result header in {path}")
        for record in reader:
            rows.append(
                TrialStats(
                    method=record["method"],
                    sweep_param=record["sweep_param"],
                    sweep_value=float(record["sweep_value"]),
                    trials=int(record["trials"]),
                    failures=int(record["failures"]),
                    emp_variance=float(record["emp_variance"]),
                    rmse=float(record["rmse"]),
                    ci95_low=float(record["ci95_low"]),
                    ci95_high=float(record["ci95_high"]),
                    theoretical_variance=(
                        None if record["theoretical_variance"] == "" else float(record["theoretical_variance"])
                    ),
                )
            )
    return rows
