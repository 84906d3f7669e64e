"""Integer solution encoding and variation operators.

A solution is a vector of n genes in {0, ..., m}: gene j names the knapsack
holding item j, 0 leaves the item out. Each item can sit in at most one
knapsack by construction. The integer operators run the real-coded versions
on [0, m] and round half up, clamped to the domain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class VariationConfig:
    mutation_prob: float
    crossover_prob: float = 0.9
    mutation_distribution_index: float = 20.0
    crossover_distribution_index: float = 20.0

    def __post_init__(self) -> None:
        if not 0.0 < self.mutation_prob <= 1.0:
            raise ValueError(f"mutation_prob must be in (0, 1], got {self.mutation_prob}")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError(f"crossover_prob must be in [0, 1], got {self.crossover_prob}")
        if self.mutation_distribution_index <= 0 or self.crossover_distribution_index <= 0:
            raise ValueError("distribution indices must be positive")


@dataclass(frozen=True)
class Solution:
    genes: np.ndarray
    num_knapsacks: int

    def __post_init__(self) -> None:
        genes = np.asarray(self.genes, dtype=np.int64)
        object.__setattr__(self, "genes", genes)
        if genes.ndim != 1 or genes.size < 1:
            raise ValueError("genes must be a non-empty vector")
        if self.num_knapsacks < 0:
            raise ValueError("num_knapsacks must be >= 0")
        if genes.min() < 0 or genes.max() > self.num_knapsacks:
            raise ValueError(f"genes must lie in 0..{self.num_knapsacks}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Solution):
            return NotImplemented
        return self.num_knapsacks == other.num_knapsacks and np.array_equal(
            self.genes, other.genes
        )

    @property
    def n(self) -> int:
        return self.genes.size


def random_solution(n: int, m: int, rng: np.random.Generator) -> Solution:
    """Uniform independent genes on {0, ..., m}."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m < 0:
        raise ValueError("m must be >= 0")
    return Solution(rng.integers(0, m + 1, size=n), m)


def sbx_crossover(
    a: Solution,
    b: Solution,
    cfg: VariationConfig,
    rng: np.random.Generator,
) -> tuple[Solution, Solution]:
    """Integer simulated binary crossover; identity when the coin says no."""
    if a.n != b.n or a.num_knapsacks != b.num_knapsacks:
        raise ValueError("parents must share length and knapsack count")
    c1, c2 = _kernels.sbx_pair(
        a.genes,
        b.genes,
        cfg.crossover_prob,
        cfg.crossover_distribution_index,
        a.num_knapsacks,
        rng,
    )
    return Solution(c1, a.num_knapsacks), Solution(c2, a.num_knapsacks)


def polynomial_mutation(
    s: Solution,
    cfg: VariationConfig,
    rng: np.random.Generator,
    mutation_prob: float | None = None,
) -> Solution:
    """Integer polynomial mutation, each gene with probability mutation_prob.

    The rate defaults to cfg.mutation_prob; passing one explicitly supports
    runtime adaptation of the rate without rebuilding the config.
    """
    p_m = cfg.mutation_prob if mutation_prob is None else mutation_prob
    out = _kernels.poly_mutation(
        s.genes, p_m, cfg.mutation_distribution_index, s.num_knapsacks, rng
    )
    return Solution(out, s.num_knapsacks)


def decode(s: Solution) -> dict[int, set[int]]:
    """Assignment map: knapsack index (1-based) -> item positions (0-based)."""
    out: dict[int, set[int]] = {i: set() for i in range(1, s.num_knapsacks + 1)}
    for j, g in enumerate(s.genes):
        if g > 0:
            out[int(g)].add(j)
    return out


def encode(assignment: dict[int, set[int]], n: int, m: int) -> Solution:
    """Inverse of decode; items absent from every set stay unassigned."""
    genes = np.zeros(n, dtype=np.int64)
    seen: set[int] = set()
    for knap, items in assignment.items():
        if not 1 <= knap <= m:
            raise ValueError(f"knapsack index {knap} outside 1..{m}")
        for j in items:
            if not 0 <= j < n:
                raise ValueError(f"item position {j} outside 0..{n - 1}")
            if j in seen:
                raise ValueError(f"item {j} assigned to more than one knapsack")
            seen.add(j)
            genes[j] = knap
    return Solution(genes, m)
