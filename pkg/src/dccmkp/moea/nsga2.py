"""Elitist dominance sorter with crowding-distance tie-breaks.

One generation: binary tournament on (rank, crowding) picks N parents,
variation produces N evaluated children, and the best N of the combined 2N
survive by (rank ascending, crowding descending), ties kept in stable index
order.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from ._stepper import BaseStepper
from .common import binary_tournament


class Nsga2Stepper(BaseStepper):
    def step(self, mutation_prob: float) -> int:
        rank = _kernels.nd_rank(self.G)
        crowd = _kernels.crowding(self.G, rank)
        parent_idx = binary_tournament(rank, crowd, self.N, self.rng)
        kid_genes, kid_G, kid_viol = self._variation(self.genes, parent_idx, mutation_prob)

        all_genes = np.concatenate([self.genes, kid_genes])
        all_G = np.concatenate([self.G, kid_G])
        all_viol = np.concatenate([self.viol, kid_viol])
        rank2 = _kernels.nd_rank(all_G)
        crowd2 = _kernels.crowding(all_G, rank2)
        order = np.lexsort((-crowd2, rank2))[: self.N]
        self.genes = np.ascontiguousarray(all_genes[order])
        self.G = np.ascontiguousarray(all_G[order])
        self.viol = np.ascontiguousarray(all_viol[order])
        return self.N
