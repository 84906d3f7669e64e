"""Exact chance-constraint reformulation for normally distributed weights.

With independent item weights N(mu_j, sigma_j^2), the load of a knapsack is
normal, so Pr(load <= B) >= alpha is equivalent to the deterministic bound
mu + K_alpha * sqrt(v) <= B where K_alpha is the standard normal alpha
quantile. Everything here works on that deterministic equivalent; a
Monte-Carlo sampler is provided as an independent check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import substream

__all__ = [
    "ConfidenceLevel",
    "KnapsackLoad",
    "normal_quantile",
    "standard_normal_cdf",
    "knapsack_loads",
    "violation",
    "monte_carlo_feasibility",
]

_SQRT2 = math.sqrt(2.0)


def standard_normal_cdf(z: float) -> float:
    # complementary-error-function form keeps full precision in both tails
    return 0.5 * math.erfc(-z / _SQRT2)


def normal_quantile(alpha: float) -> float:
    """Standard normal quantile via bisection on the erfc-based CDF.

    Accurate to |Phi(z) - alpha| <= 1e-12 across the whole open interval,
    including alpha = 1 - 1e-8 deep in the upper tail. alpha = 1 has no
    quantile and is rejected.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(
            f"alpha must lie strictly inside (0, 1), got {alpha!r} "
            "(the quantile is undefined at the endpoints)"
        )
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if standard_normal_cdf(mid) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ConfidenceLevel:
    """Confidence alpha in (0.5, 1) with its cached normal quantile."""

    alpha: float
    k_alpha: float = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0.5, 1), got {self.alpha!r}")
        if self.k_alpha is None:
            object.__setattr__(self, "k_alpha", normal_quantile(self.alpha))
        elif abs(standard_normal_cdf(self.k_alpha) - self.alpha) > 1e-10:
            raise ValueError("k_alpha does not invert to alpha")


@dataclass(frozen=True)
class KnapsackLoad:
    mean_sum: float
    var_sum: float
    chance_weight: float


def knapsack_loads(instance, genes, conf: ConfidenceLevel) -> list[KnapsackLoad]:
    """Per-knapsack mean, variance, and chance weight for an assignment.

    genes[j] = i assigns item j to knapsack i (1-based); 0 leaves it out.
    """
    idx = np.asarray(genes, dtype=np.int64)
    if idx.ndim != 1 or idx.shape[0] != instance.n:
        raise ValueError(f"expected {instance.n} genes, got shape {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() > instance.m):
        raise ValueError(f"genes must lie in 0..{instance.m}")
    m = instance.m
    mean_sums = np.bincount(idx, weights=instance.mean_weights, minlength=m + 1)[1:]
    var_sums = np.bincount(idx, weights=instance.variances, minlength=m + 1)[1:]
    chance = mean_sums + conf.k_alpha * np.sqrt(var_sums)
    return [
        KnapsackLoad(float(ms), float(vs), float(cw))
        for ms, vs, cw in zip(mean_sums, var_sums, chance)
    ]


def violation(loads: Sequence[KnapsackLoad], capacities: Sequence[float]) -> float:
    """Aggregated overload: sum of max(0, chance_weight - capacity)."""
    if len(loads) != len(capacities):
        raise ValueError(
            f"{len(loads)} loads vs {len(capacities)} capacities"
        )
    return float(
        sum(max(0.0, ld.chance_weight - b) for ld, b in zip(loads, capacities))
    )


def monte_carlo_feasibility(
    instance, genes, samples: int, seed: int
) -> list[float]:
    """Empirical per-knapsack probability that the sampled load fits.

    Draws every assigned item's weight from N(mu_j, sigma_j^2) independently;
    the chance-constraint reformulation should agree with these frequencies up
    to binomial noise.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    idx = np.asarray(genes, dtype=np.int64)
    rng = substream(seed, "monte-carlo")
    m = instance.m
    hits = np.zeros(m, dtype=np.int64)
    caps = instance.capacity_array
    assigned = idx > 0
    mu = instance.mean_weights[assigned]
    sd = np.sqrt(instance.variances[assigned])
    which = idx[assigned] - 1
    chunk = max(1, min(samples, 10_000_000 // max(1, mu.size)))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        if mu.size:
            draws = rng.normal(mu, sd, size=(take, mu.size))
            totals = np.zeros((take, m))
            np.add.at(totals.T, which, draws.T)
        else:
            totals = np.zeros((take, m))
        hits += (totals <= caps).sum(axis=0)
        done += take
    return [float(h) / samples for h in hits]
