"""Penalized bi-objective fitness and the dominance relation.

Feasible solutions score (profit, chance-weight sum); infeasible ones score
(-violation, M + violation) with M the current capacity sum, which makes every
feasible point dominate every infeasible one. f1 is maximized, f2 minimized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .encoding import Solution
from .stochastic import ConfidenceLevel


class EvaluationCounter:
    """Mutable evaluation tally; one run owns one counter."""

    __slots__ = ("count",)

    def __init__(self) -> None:
        self.count = 0

    def add(self, k: int = 1) -> int:
        self.count += k
        return self.count


@dataclass(frozen=True)
class Fitness:
    f1: float
    f2: float
    feasible: bool
    violation: float
    profit: int
    chance_weight_sum: float


def evaluate(
    instance,
    solution: Solution,
    conf: ConfidenceLevel,
    capacities_now: np.ndarray | None = None,
    counter: EvaluationCounter | None = None,
) -> Fitness:
    """Fitness of one solution against the current capacities.

    capacities_now defaults to the instance's base capacities; M is their sum
    at call time, so the penalty tracks dynamic changes. Each call counts as
    one evaluation.
    """
    caps = (
        instance.capacity_array
        if capacities_now is None
        else np.asarray(capacities_now, dtype=np.float64)
    )
    if caps.shape[0] != instance.m:
        raise ValueError(f"expected {instance.m} capacities, got {caps.shape[0]}")
    if solution.n != instance.n or solution.num_knapsacks != instance.m:
        raise ValueError("solution shape does not match the instance")
    profit, wsum, viol = _kernels.evaluate_one(
        solution.genes,
        instance.mean_weights,
        instance.variances,
        instance.profits,
        caps,
        conf.k_alpha,
    )
    if counter is not None:
        counter.add()
    if viol == 0.0:
        return Fitness(
            f1=profit,
            f2=wsum,
            feasible=True,
            violation=0.0,
            profit=int(round(profit)),
            chance_weight_sum=wsum,
        )
    big_m = float(caps.sum())
    return Fitness(
        f1=-viol,
        f2=big_m + viol,
        feasible=False,
        violation=viol,
        profit=int(round(profit)),
        chance_weight_sum=wsum,
    )


def dominates(a: Fitness, b: Fitness) -> bool:
    """Pareto dominance: no worse on both axes, better on at least one."""
    return (a.f1 >= b.f1 and a.f2 <= b.f2) and (a.f1 > b.f1 or a.f2 < b.f2)


def to_min_frame(fit: Fitness) -> tuple[float, float]:
    """Map to the internal minimization frame used by the optimizers."""
    return (-fit.f1, fit.f2)
