"""Decomposition-based optimizer (Tchebycheff scalarization).

Each of the N subproblems carries a weight vector on the uniform lattice
lambda_i = (i/(N-1), 1-i/(N-1)) and mates within its neighborhood of the
T = ceil(N/10) closest weight vectors. A visit recombines two distinct
neighbors, evaluates both children, updates the ideal point, and lets each
child replace at most `moead_replacement_limit` neighbors whose scalarized
value it matches or improves. The ideal point is rebuilt from the population
whenever capacities change.
"""
from __future__ import annotations

import math

import numpy as np

from .. import _kernels
from ._stepper import BaseStepper
from .common import das_dennis, neighbor_table


class MoeadStepper(BaseStepper):
    def __init__(self, instance, conf, config, rng) -> None:
        super().__init__(instance, conf, config, rng)
        self.weights = das_dennis(self.N - 1)
        self.T = max(2, math.ceil(0.1 * self.N))
        self.neighbors = neighbor_table(self.weights, self.T)
        self.replace_cap = config.moead_replacement_limit
        self.z = self.G.min(axis=0).copy()
        self._perm = np.empty(0, dtype=np.int64)
        self._cursor = 0

    def _next_order(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.int64)
        filled = 0
        while filled < count:
            if self._cursor >= self._perm.shape[0]:
                self._perm = self.rng.permutation(self.N)
                self._cursor = 0
            take = min(count - filled, self._perm.shape[0] - self._cursor)
            out[filled : filled + take] = self._perm[self._cursor : self._cursor + take]
            self._cursor += take
            filled += take
        return out

    def step(self, mutation_prob: float) -> int:
        # Two evaluations per visit, so N // 2 visits keep the stride at N.
        visits = max(1, self.N // 2)
        order = self._next_order(visits)
        return int(
            _kernels.moead_pass(
                self.genes, self.G, self.viol, self.z, self.neighbors,
                self.weights, self.mu, self.var, self.prof, self.caps,
                self.k_alpha, self.cap_sum, self.cx_prob, self.eta_c,
                mutation_prob, self.eta_m, self.replace_cap, order, self.rng,
            )
        )

    def apply_change(self, capacities: np.ndarray) -> int:
        cost = super().apply_change(capacities)
        self.z = self.G.min(axis=0).copy()
        return cost
