"""Shared optimizer substrate: configs, decomposition weights, sorting.

All four algorithms work on int64 gene matrices and a float64 objective
matrix in the minimization frame (see objectives.to_min_frame). The public
sorting and scalarization helpers below accept Fitness objects and map them
into that frame.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .. import _kernels
from ..encoding import VariationConfig
from ..objectives import Fitness, to_min_frame

ALGORITHMS = ("MOEAD", "NSGA2", "NSGA3", "SPEA2")


@dataclass(frozen=True)
class Individual:
    solution: object
    fitness: Fitness
    stale: bool = False


@dataclass(frozen=True)
class AlgorithmConfig:
    algorithm: str
    population_size: int = 100
    budget_evaluations: int = 10_000_000
    moead_replacement_limit: int = 1
    moead_neighbor_selection_prob: float = 1.0
    nsga3_reference_count: int = 100
    spea2_archive_size: int | None = None  # defaults to population_size
    variation: VariationConfig = field(default=None)  # type: ignore[assignment]
    seed: int = 0
    count_change_reevaluations: bool = True

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.budget_evaluations < 1:
            raise ValueError("budget_evaluations must be >= 1")
        if self.moead_replacement_limit < 1:
            raise ValueError("moead_replacement_limit must be >= 1")
        if not 0.0 <= self.moead_neighbor_selection_prob <= 1.0:
            raise ValueError("moead_neighbor_selection_prob must be in [0, 1]")
        if self.nsga3_reference_count < 2:
            raise ValueError("nsga3_reference_count must be >= 2")
        if self.spea2_archive_size is None:
            object.__setattr__(self, "spea2_archive_size", self.population_size)
        if self.spea2_archive_size < 1:
            raise ValueError("spea2_archive_size must be >= 1")
        if self.variation is None:
            object.__setattr__(self, "variation", VariationConfig(mutation_prob=0.01))


def das_dennis(divisions: int, objectives: int = 2) -> np.ndarray:
    """Uniform simplex lattice: all weight vectors with coordinates k/divisions."""
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    if objectives < 2:
        raise ValueError("objectives must be >= 2")
    points: list[list[float]] = []

    def recurse(prefix: list[int], remaining: int, axes_left: int) -> None:
        if axes_left == 1:
            points.append([v / divisions for v in prefix + [remaining]])
            return
        for v in range(remaining + 1):
            recurse(prefix + [v], remaining - v, axes_left - 1)

    recurse([], divisions, objectives)
    return np.array(points, dtype=np.float64)


def neighbor_table(weights: np.ndarray, neighborhood: int) -> np.ndarray:
    """Indices of each weight vector's `neighborhood` nearest weights (self included)."""
    d = np.linalg.norm(weights[:, None, :] - weights[None, :, :], axis=-1)
    return np.ascontiguousarray(
        np.argsort(d, axis=1, kind="stable")[:, :neighborhood]
    )


def tchebycheff(fit: Fitness, lam: Sequence[float], z_star: Sequence[float]) -> float:
    """Weighted Chebyshev distance to the ideal point, minimization frame."""
    g1, g2 = to_min_frame(fit)
    return max(lam[0] * abs(g1 - z_star[0]), lam[1] * abs(g2 - z_star[1]))


def _as_min_frame_matrix(fitnesses: Sequence[Fitness]) -> np.ndarray:
    G = np.empty((len(fitnesses), 2))
    for i, f in enumerate(fitnesses):
        G[i, 0], G[i, 1] = to_min_frame(f)
    return G


def fast_nondominated_sort(fitnesses: Sequence[Fitness]) -> list[list[int]]:
    """Partition indices into fronts; front 0 is the non-dominated set."""
    if not fitnesses:
        return []
    rank = _kernels.nd_rank(_as_min_frame_matrix(fitnesses))
    fronts: list[list[int]] = [[] for _ in range(int(rank.max()) + 1)]
    for i, r in enumerate(rank):
        fronts[int(r)].append(i)
    return fronts


def crowding_distance(front: Sequence[Fitness]) -> list[float]:
    """Crowding distances of one front; boundaries get +inf."""
    if not front:
        raise ValueError("front must be non-empty")
    G = _as_min_frame_matrix(front)
    dist = _kernels.crowding(G, np.zeros(len(front), dtype=np.int64))
    return [float(d) for d in dist]


def binary_tournament(
    keys_rank: np.ndarray,
    keys_tie: np.ndarray,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized binary tournament: lower rank wins, larger tie-key breaks ties.

    Equal (rank, tie-key) pairs keep the first contestant.
    """
    n = keys_rank.shape[0]
    a = rng.integers(0, n, size=count)
    b = rng.integers(0, n, size=count)
    a_wins = (keys_rank[a] < keys_rank[b]) | (
        (keys_rank[a] == keys_rank[b]) & (keys_tie[a] >= keys_tie[b])
    )
    return np.where(a_wins, a, b)
