"""Common machinery for the four population steppers.

A stepper owns the evaluated population arrays and advances the search in
slices of roughly one population worth of evaluations, so the driver loop in
runner.py can interleave capacity changes at exact evaluation counts.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from ..instance import Instance
from ..stochastic import ConfidenceLevel
from .common import AlgorithmConfig


class BaseStepper:
    def __init__(
        self,
        instance: Instance,
        conf: ConfidenceLevel,
        config: AlgorithmConfig,
        rng: np.random.Generator,
    ) -> None:
        self.instance = instance
        self.config = config
        self.rng = rng
        self.mu = instance.mean_weights
        self.var = instance.variances
        self.prof = instance.profits
        self.caps = instance.capacity_array.copy()
        self.cap_sum = float(self.caps.sum())
        self.k_alpha = conf.k_alpha
        self.n = len(instance.items)
        self.m = len(instance.capacities)
        self.N = config.population_size
        vc = config.variation
        self.cx_prob = vc.crossover_prob
        self.eta_c = float(vc.crossover_distribution_index)
        self.eta_m = float(vc.mutation_distribution_index)

        self.genes = rng.integers(0, self.m + 1, size=(self.N, self.n), dtype=np.int64)
        self.G = np.empty((self.N, 2))
        self.viol = np.empty(self.N)
        self._eval_into(self.genes, self.G, self.viol)

    @property
    def init_evaluations(self) -> int:
        return self.N

    def _eval_into(self, genes: np.ndarray, G: np.ndarray, viol: np.ndarray) -> None:
        _kernels.evaluate_batch(
            genes, self.mu, self.var, self.prof, self.caps, self.k_alpha,
            self.cap_sum, G, viol,
        )

    def step(self, mutation_prob: float) -> int:
        """Advance by about one population of evaluations; returns evals used."""
        raise NotImplementedError

    def apply_change(self, capacities: np.ndarray) -> int:
        """Install new capacities and re-evaluate retained individuals."""
        self.caps = np.asarray(capacities, dtype=np.float64).copy()
        self.cap_sum = float(self.caps.sum())
        self._eval_into(self.genes, self.G, self.viol)
        return self.N

    def feasible_count(self) -> int:
        return int((self.viol == 0.0).sum())

    def retained(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(genes, G, viol) of everything the algorithm currently keeps."""
        return self.genes, self.G, self.viol

    def _variation(
        self, pool_genes: np.ndarray, parent_idx: np.ndarray, mutation_prob: float
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        count = parent_idx.shape[0]
        kid_genes = np.empty((count, self.n), dtype=np.int64)
        kid_G = np.empty((count, 2))
        kid_viol = np.empty(count)
        _kernels.variation_batch(
            pool_genes, parent_idx, self.mu, self.var, self.prof, self.caps,
            self.k_alpha, self.cap_sum, self.cx_prob, self.eta_c,
            mutation_prob, self.eta_m, self.rng, kid_genes, kid_G, kid_viol,
        )
        return kid_genes, kid_G, kid_viol
