"""Tour of the core privacy primitives.

Draws Laplace noise from a reproducible stream, releases a private median
with the interval exponential mechanism, and shows how Poisson subsampling
changes the usable privacy parameter.

Usage:
    python demos/01_privacy_mechanisms.py
"""

import numpy as np

from hetdp import (
    DataDomain,
    RandomStream,
    amplified_epsilon,
    exact_quantile,
    exp_mech_quantile,
    quantile_interval_probabilities,
    sample_laplace_vector,
)

stream = RandomStream(seed=7)

print("== Laplace noise ==")
scale = 20.0 / 0.1  # sum sensitivity 20, epsilon 0.1
draws = sample_laplace_vector(stream.substream(0), scale, 200_000)
print(f"scale {scale:g}: empirical variance {draws.var():.1f} vs closed form {2 * scale**2:.1f}")

print()
print("== Private median via the exponential mechanism ==")
domain = DataDomain(-4.0, 4.0, 1.0)
data = stream.substream(1).normals(0.0, 1.0, 501)
true_median = exact_quantile(data, 0.5)
for epsilon in (0.1, 1.0, 10.0):
    releases = [
        exp_mech_quantile(data, 0.5, epsilon, domain, stream.substream(2, i))
        for i in range(200)
    ]
    err = np.sqrt(np.mean((np.array(releases) - true_median) ** 2))
    print(f"epsilon {epsilon:>5}: rmse vs sample median = {err:.4f}")

edges, probs = quantile_interval_probabilities(data, 0.5, 1.0, domain)
top = np.argsort(probs)[-3:][::-1]
print("three most likely output intervals at epsilon = 1:")
for i in top:
    print(f"  [{edges[i]:+.4f}, {edges[i + 1]:+.4f})  p = {probs[i]:.3f}")

print()
print("== Privacy amplification by subsampling ==")
print("keeping a p-fraction of the data lets a mechanism run at a larger epsilon")
print(f"{'p':>6} {'usable epsilon':>15} {'crude eps/p':>12}")
for p in (1.0, 0.5, 0.25, 0.1):
    print(f"{p:>6} {amplified_epsilon(0.5, p):>15.4f} {0.5 / p:>12.4f}")
