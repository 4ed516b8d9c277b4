"""Core differential-privacy primitives.

Seedable substreams of randomness, Laplace noise via a single-uniform
inverse-CDF transform, the interval exponential mechanism for quantiles,
and the effective privacy parameter under Poisson subsampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInputError, InvalidParameterError

_MASK64 = (1 << 64) - 1
# Smallest positive value a 53-bit uniform draw can take; used to keep the
# inverse-CDF transform finite when the raw draw is exactly 0.
_TINY_UNIFORM = 2.0 ** -53


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_stream_id(parent_id: int, *indices: int) -> int:
    """Mix substream indices into a parent stream id.

    Deterministic 64-bit hash chain; distinct index tuples map to distinct
    ids up to negligible collision probability, so derived streams can be
    treated as independent.
    """
    h = parent_id & _MASK64
    for ix in indices:
        if ix < 0:
            raise InvalidParameterError(f"stream indices must be non-negative, got {ix}")
        h = _splitmix64(h ^ _splitmix64(ix & _MASK64))
    return h


class RandomStream:
    """A reproducible substream of random draws.

    The same (seed, stream_id) pair always yields the identical sequence of
    draws; distinct stream ids under one seed behave as independent sources.
    A stream is single-owner mutable state: hand disjoint substreams to
    parallel workers instead of sharing one stream.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not isinstance(value, (int, np.integer)) or not (0 <= int(value) <= _MASK64):
                raise InvalidParameterError(f"{name} must be a 64-bit unsigned integer, got {value!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._generator = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        )

    def substream(self, *indices: int) -> "RandomStream":
        """Derive an independent stream keyed by this stream's id and ``indices``."""
        return RandomStream(self.seed, derive_stream_id(self.stream_id, *indices))

    def random(self) -> float:
        """One uniform draw from [0, 1)."""
        return float(self._generator.random())

    def uniforms(self, size: int) -> np.ndarray:
        return self._generator.random(size)

    def normals(self, mu: float, sigma: float, size: int) -> np.ndarray:
        return self._generator.normal(mu, sigma, size)

    def integers(self, low: int, high: int, size) -> np.ndarray:
        return self._generator.integers(low, high, size=size)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed}, stream_id={self.stream_id})"


@dataclass(frozen=True)
class DataDomain:
    """The value range [a, b] data is clamped to, plus the assumed data variance.

    The sensitivity radius ``r = max(|a|, |b|)`` bounds how much one clamped
    point can move a group sum.
    """

    a: float
    b: float
    sigma2: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b) and self.a < self.b):
            raise InvalidParameterError(f"domain bounds must be finite with a < b, got [{self.a}, {self.b}]")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise InvalidParameterError(f"sigma2 must be positive and finite, got {self.sigma2}")

    @property
    def r(self) -> float:
        return max(abs(self.a), abs(self.b))

    def clamp(self, values) -> np.ndarray:
        return np.clip(np.asarray(values, dtype=float), self.a, self.b)


@dataclass(frozen=True)
class LaplaceNoise:
    """Zero-mean Laplace noise with density scale ``scale`` (variance 2*scale**2)."""

    scale: float

    def __post_init__(self):
        _check_scale(self.scale)

    @property
    def variance(self) -> float:
        return 2.0 * self.scale * self.scale

    def sample(self, stream: RandomStream) -> float:
        return sample_laplace(stream, self.scale)


def _check_scale(scale: float) -> None:
    if not (isinstance(scale, (int, float, np.floating)) and math.isfinite(scale) and scale > 0):
        raise InvalidParameterError(f"Laplace scale must be positive and finite, got {scale!r}")


def laplace_inverse_cdf(p, scale: float):
    """Quantile function of Laplace(0, scale); p = 0.5 maps to exactly 0.

    Linear in ``scale``, so draws from a shared uniform stream stay in exact
    ratio across scales.
    """
    _check_scale(scale)
    shifted = np.asarray(p, dtype=float) - 0.5
    with np.errstate(divide="ignore"):
        out = -scale * np.sign(shifted) * np.log1p(-2.0 * np.abs(shifted))
    return out if out.ndim else float(out)


def sample_laplace(stream: RandomStream, scale: float) -> float:
    """One Laplace(0, scale) draw from one uniform draw.

    Uses the inverse-CDF transform so a call consumes exactly one uniform,
    keeping substream alignment reproducible across runs.
    """
    _check_scale(scale)
    u = stream.random()
    if u == 0.0:
        u = _TINY_UNIFORM
    return laplace_inverse_cdf(u, scale)


def sample_laplace_vector(stream: RandomStream, scale: float, size: int) -> np.ndarray:
    """Vector of independent Laplace(0, scale) draws (one uniform each)."""
    _check_scale(scale)
    u = stream.uniforms(size)
    u[u == 0.0] = _TINY_UNIFORM
    return laplace_inverse_cdf(u, scale)


def amplified_epsilon(epsilon: float, p: float) -> float:
    """Effective privacy parameter usable after Poisson subsampling at rate p.

    Returns ln(1 + (1/p) * (exp(epsilon) - 1)).  Always at least ``epsilon``,
    with equality only at p = 1, and never exceeds the crude epsilon/p
    overestimate.
    """
    if not (isinstance(epsilon, (int, float, np.floating)) and math.isfinite(epsilon) and epsilon > 0):
        raise InvalidParameterError(f"epsilon must be positive and finite, got {epsilon!r}")
    if not (0.0 < p <= 1.0):
        raise InvalidParameterError(f"subsampling rate p must lie in (0, 1], got {p!r}")
    if p == 1.0:
        return float(epsilon)
    return math.log1p(math.expm1(epsilon) / p)


def _check_quantile(q: float) -> None:
    if not (isinstance(q, (int, float, np.floating)) and 0.0 < q < 1.0):
        raise InvalidParameterError(f"quantile q must lie in (0, 1), got {q!r}")


def exact_quantile(data, q: float) -> float:
    """Order statistic at rank ceil(q*n), 1-indexed, of the sorted data.

    Non-private; used for public groups and as the ground-truth oracle.
    """
    values = np.asarray(data, dtype=float)
    if values.size == 0:
        raise EmptyInputError("exact_quantile needs at least one data point")
    _check_quantile(q)
    n = values.size
    # round() guards against float fuzz flipping ceil at integer q*n
    rank = int(math.ceil(round(q * n, 9)))
    rank = min(max(rank, 1), n)
    return float(np.partition(values, rank - 1)[rank - 1])


def quantile_interval_probabilities(data, q: float, epsilon: float, domain: DataDomain):
    """Interval edges and selection probabilities of the quantile mechanism.

    Data is clamped to the domain and sorted; the domain bounds act as
    boundary sentinels, giving n+1 half-open candidate intervals
    [x_(i), x_(i+1)).  Interval i is weighted by
    length * exp(epsilon * u_i / 2) with rank-distance utility
    u_i = -|i - q*n| (sensitivity 1).  Zero-length intervals get probability
    exactly 0.  Probabilities are computed in log space and sum to 1.
    """
    values = np.asarray(data, dtype=float)
    if values.size == 0:
        raise EmptyInputError("quantile mechanism needs at least one data point")
    _check_quantile(q)
    if not (isinstance(epsilon, (int, float, np.floating)) and math.isfinite(epsilon) and epsilon > 0):
        raise InvalidParameterError(f"epsilon must be positive and finite, got {epsilon!r}")
    n = values.size
    edges = np.concatenate(([domain.a], np.sort(domain.clamp(values)), [domain.b]))
    gaps = np.diff(edges)
    utilities = -np.abs(np.arange(n + 1, dtype=float) - q * n)
    with np.errstate(divide="ignore"):
        log_weights = np.log(gaps) + 0.5 * epsilon * utilities
    shift = np.max(log_weights)
    if not np.isfinite(shift):
        # all candidate intervals have zero length: every point sits on a bound
        raise InvalidParameterError("domain has no room for any output interval")
    probs = np.exp(log_weights - shift)
    probs /= probs.sum()
    return edges, probs


def exp_mech_quantile(data, q: float, epsilon: float, domain: DataDomain, stream: RandomStream) -> float:
    """epsilon-DP quantile release via the interval exponential mechanism.

    Selects an interval with probability proportional to
    length * exp(epsilon * utility / 2) and returns a uniform draw inside it.
    Consumes exactly two uniform draws.
    """
    edges, probs = quantile_interval_probabilities(data, q, epsilon, domain)
    cumulative = np.cumsum(probs)
    cumulative[-1] = 1.0
    index = int(np.searchsorted(cumulative, stream.random(), side="right"))
    low, high = edges[index], edges[index + 1]
    return float(low + (high - low) * stream.random())
