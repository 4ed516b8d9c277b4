"""How inverse-variance weights combine groups with different privacy budgets.

A public group and a tightly private group of equal size: the public group
should carry nearly all the weight, and the closed form should agree with an
exhaustive grid search.

Usage:
    python demos/02_optimal_mixing_weights.py
"""

import numpy as np

from hetdp import (
    PUBLIC,
    DataDomain,
    MixWeights,
    PrivacyGroup,
    brute_force_optimal_weights,
    group_variance,
    joint_variance,
    optimal_weights,
)

domain = DataDomain(-20.0, 20.0, 25.0)
groups = [
    PrivacyGroup(np.zeros(100), PUBLIC),
    PrivacyGroup(np.zeros(100), 0.1),
]

print("two groups of 100 points each, sigma^2 = 25, clamped to [-20, 20]:")
for i, g in enumerate(groups):
    label = "public" if i == 0 else f"eps = {g.epsilon}"
    print(f"  group {i} ({label:>10}): per-group variance {group_variance(g, domain):.4f}")

weights = optimal_weights(groups, domain)
print(f"\nclosed-form weights:      {weights.beta}")
grid = brute_force_optimal_weights([group_variance(g, domain) for g in groups], 100_000)
print(f"grid-search weights:      {grid}")

optimal = joint_variance(weights, groups, domain)
uniform = joint_variance(MixWeights(np.array([0.5, 0.5])), groups, domain)
print(f"\njoint variance, optimal:  {optimal:.5f}")
print(f"joint variance, uniform:  {uniform:.5f}  ({uniform / optimal:.1f}x worse)")

print("\nhow the private group's weight grows with its budget:")
print(f"{'epsilon':>8} {'weight on private group':>24}")
for eps in (0.01, 0.1, 0.5, 1.0, 5.0):
    w = optimal_weights([groups[0], PrivacyGroup(np.zeros(100), eps)], domain)
    print(f"{eps:>8} {w.beta[1]:>24.5f}")
