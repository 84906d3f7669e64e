"""Strength-based archive optimizer.

Fitness over the combined population and archive is raw strength plus a
k-nearest-neighbor density term, k = floor(sqrt(N + archive capacity)).
Non-dominated members (fitness < 1) form the next archive, truncated by
iterated nearest-neighbor removal when too many and topped up with the best
dominated members when too few. Mating selection is a binary tournament on
archive fitness.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .. import _kernels
from ..objectives import Fitness, to_min_frame
from ._stepper import BaseStepper
from .common import binary_tournament


def spea2_fitness(fitnesses: Sequence[Fitness], k: int | None = None) -> list[float]:
    """Strength + density fitness of each member; < 1 means non-dominated."""
    if not fitnesses:
        raise ValueError("fitnesses must be non-empty")
    G = np.empty((len(fitnesses), 2))
    for i, f in enumerate(fitnesses):
        G[i, 0], G[i, 1] = to_min_frame(f)
    if k is None:
        k = int(math.isqrt(len(fitnesses)))
    return [float(v) for v in _kernels.spea2_raw_density(G, k)]


class Spea2Stepper(BaseStepper):
    def __init__(self, instance, conf, config, rng) -> None:
        super().__init__(instance, conf, config, rng)
        self.archive_size = config.spea2_archive_size
        self.k = int(math.isqrt(self.N + self.archive_size))
        self.arc_genes = np.empty((0, self.n), dtype=np.int64)
        self.arc_G = np.empty((0, 2))
        self.arc_viol = np.empty(0)
        self.arc_fit = np.empty(0)

    def _environmental(self) -> None:
        union_genes = np.concatenate([self.genes, self.arc_genes])
        union_G = np.concatenate([self.G, self.arc_G])
        union_viol = np.concatenate([self.viol, self.arc_viol])
        fit = _kernels.spea2_raw_density(union_G, self.k)

        nd = np.where(fit < 1.0)[0]
        if len(nd) > self.archive_size:
            survivors = _kernels.spea2_truncate(union_G[nd], self.archive_size)
            keep = nd[survivors]
        elif len(nd) < self.archive_size:
            dominated = np.where(fit >= 1.0)[0]
            fill = dominated[np.argsort(fit[dominated], kind="stable")]
            keep = np.concatenate([nd, fill[: self.archive_size - len(nd)]])
        else:
            keep = nd
        self.arc_genes = np.ascontiguousarray(union_genes[keep])
        self.arc_G = np.ascontiguousarray(union_G[keep])
        self.arc_viol = np.ascontiguousarray(union_viol[keep])
        self.arc_fit = fit[keep].copy()

    def step(self, mutation_prob: float) -> int:
        self._environmental()
        # Lower fitness wins the tournament; constant tie key keeps the
        # first contestant on exact ties.
        rank_key = self.arc_fit
        tie_key = np.zeros_like(self.arc_fit)
        parent_idx = binary_tournament(rank_key, tie_key, self.N, self.rng)
        self.genes, self.G, self.viol = self._variation(
            self.arc_genes, parent_idx, mutation_prob
        )
        return self.N

    def apply_change(self, capacities: np.ndarray) -> int:
        cost = super().apply_change(capacities)
        if len(self.arc_genes):
            arc_G = np.empty((len(self.arc_genes), 2))
            arc_viol = np.empty(len(self.arc_genes))
            self._eval_into(self.arc_genes, arc_G, arc_viol)
            self.arc_G, self.arc_viol = arc_G, arc_viol
            fit = _kernels.spea2_raw_density(
                np.concatenate([self.G, self.arc_G]), self.k
            )
            self.arc_fit = fit[self.N :].copy()
            cost += len(self.arc_genes)
        return cost

    def feasible_count(self) -> int:
        return int((self.viol == 0.0).sum() + (self.arc_viol == 0.0).sum())

    def retained(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            np.concatenate([self.genes, self.arc_genes]),
            np.concatenate([self.G, self.arc_G]),
            np.concatenate([self.viol, self.arc_viol]),
        )
