"""Ground-truth solvers for the static chance-reformulated problem.

Three routes with different size/guarantee trade-offs: full enumeration for
tiny instances, depth-first branch and bound with a fractional profit bound,
and a density greedy that always yields a feasible lower bound. Externally
computed optima can be loaded from a baseline text file.
"""
from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .instance import Instance, instance_id
from .stochastic import ConfidenceLevel

BASELINE_METHODS = ("EXACT_BB", "EXHAUSTIVE", "GREEDY_LB", "EXTERNAL_FILE")
EXHAUSTIVE_LIMIT = 100_000_000
_TIME_CHECK_MASK = 0xFFF


@dataclass(frozen=True)
class BaselineOptimum:
    instance_id: str
    profit: int
    method: str
    gap: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "profit", int(self.profit))
        object.__setattr__(self, "gap", float(self.gap))
        if self.method not in BASELINE_METHODS:
            raise ValueError(f"unknown baseline method {self.method!r}")
        if self.profit < 0:
            raise ValueError("baseline profit must be >= 0")
        if not (self.gap >= 0.0):
            raise ValueError("baseline gap must be >= 0")
        if self.method in ("EXACT_BB", "EXHAUSTIVE") and self.gap != 0.0:
            raise ValueError(f"{self.method} baselines must report gap 0")


def _capacity_array(instance: Instance, capacities: Sequence[float] | None) -> np.ndarray:
    if capacities is None:
        return instance.capacity_array.copy()
    caps = np.asarray(capacities, dtype=np.float64)
    if caps.shape != (len(instance.capacities),):
        raise ValueError("capacity override must match the knapsack count")
    return caps


def exhaustive_optimum(
    instance: Instance,
    conf: ConfidenceLevel,
    capacities: Sequence[float] | None = None,
) -> BaselineOptimum:
    """Exact optimum by enumerating every assignment vector.

    Only for instances with (m+1)^n <= 1e8; the empty solution is always
    feasible, so the result is at least 0.
    """
    n = len(instance.items)
    m = len(instance.capacities)
    total = (m + 1) ** n
    if total > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"instance too large to enumerate: (m+1)^n = {total} > {EXHAUSTIVE_LIMIT}"
        )
    caps = _capacity_array(instance, capacities)
    k_alpha = conf.k_alpha
    powers = (m + 1) ** np.arange(n, dtype=np.int64)
    best = 0.0
    chunk = 1 << 15
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % (m + 1)
        feasible = np.ones(len(codes), dtype=bool)
        for i in range(1, m + 1):
            mask = digits == i
            mu_sum = mask @ instance.mean_weights
            var_sum = mask @ instance.variances
            feasible &= mu_sum + k_alpha * np.sqrt(var_sum) <= caps[i - 1]
        if feasible.any():
            profits = (digits > 0) @ instance.profits
            best = max(best, float(profits[feasible].max()))
    return BaselineOptimum(instance_id(instance), int(round(best)), "EXHAUSTIVE", 0.0)


def _greedy_assignment(
    instance: Instance, conf: ConfidenceLevel, caps: np.ndarray
) -> tuple[np.ndarray, float]:
    """First-fit by residual chance capacity in item density order."""
    n = len(instance.items)
    m = len(instance.capacities)
    mu = instance.mean_weights
    var = instance.variances
    prof = instance.profits
    k_alpha = conf.k_alpha
    density = prof / (mu + k_alpha * np.sqrt(var))
    order = np.argsort(-density, kind="stable")

    genes = np.zeros(n, dtype=np.int64)
    mu_acc = np.zeros(m)
    var_acc = np.zeros(m)
    w_acc = np.zeros(m)
    profit = 0.0
    for j in order:
        residual_order = np.argsort(-(caps - w_acc), kind="stable")
        for i in residual_order:
            w_new = (mu_acc[i] + mu[j]) + k_alpha * math.sqrt(var_acc[i] + var[j])
            if w_new <= caps[i]:
                genes[j] = i + 1
                mu_acc[i] += mu[j]
                var_acc[i] += var[j]
                w_acc[i] = w_new
                profit += prof[j]
                break
    return genes, profit


def _fractional_bound(
    profit_now: float,
    start: int,
    residual: float,
    mu_sorted: np.ndarray,
    prof_sorted: np.ndarray,
) -> float:
    """Profit bound: pack remaining items fractionally into the pooled
    mean-weight residual, ignoring the variance of items not yet placed."""
    total = profit_now
    for t in range(start, len(mu_sorted)):
        if residual <= 0.0:
            break
        if mu_sorted[t] <= residual:
            total += prof_sorted[t]
            residual -= mu_sorted[t]
        else:
            total += prof_sorted[t] * residual / mu_sorted[t]
            residual = 0.0
    return total


def branch_and_bound_optimum(
    instance: Instance,
    conf: ConfidenceLevel,
    time_limit: float | None = None,
    capacities: Sequence[float] | None = None,
) -> BaselineOptimum:
    """Depth-first search over assignments with fractional-profit pruning.

    Completes exactly (gap 0) when unconstrained by time. When the limit
    expires, the feasible incumbent is returned as a lower bound with the
    root-relaxation gap; the method then reads GREEDY_LB because only the
    lower-bound guarantee survives an interrupted search.
    """
    n = len(instance.items)
    m = len(instance.capacities)
    caps = _capacity_array(instance, capacities)
    k_alpha = conf.k_alpha
    density = instance.profits / instance.mean_weights
    order = np.argsort(-density, kind="stable")
    mu_o = instance.mean_weights[order]
    var_o = instance.variances[order]
    prof_o = instance.profits[order]

    greedy_genes, greedy_profit = _greedy_assignment(instance, conf, caps)
    incumbent = greedy_profit

    deadline = None if time_limit is None else time.monotonic() + time_limit
    state = {"nodes": 0, "interrupted": False, "incumbent": incumbent}
    mu_acc = np.zeros(m)
    var_acc = np.zeros(m)
    w_acc = np.zeros(m)

    def residual_sum() -> float:
        r = caps - w_acc
        return float(r[r > 0.0].sum())

    root_bound = _fractional_bound(0.0, 0, float(caps.sum()), mu_o, prof_o)

    def dfs(j: int, profit_now: float) -> None:
        state["nodes"] += 1
        if deadline is not None and (state["nodes"] & _TIME_CHECK_MASK) == 0:
            if time.monotonic() > deadline:
                state["interrupted"] = True
        if state["interrupted"]:
            return
        if j == n:
            if profit_now > state["incumbent"]:
                state["incumbent"] = profit_now
            return
        if _fractional_bound(profit_now, j, residual_sum(), mu_o, prof_o) \
                <= state["incumbent"] + 1e-9:
            return
        for i in range(m):
            var_new = var_acc[i] + var_o[j]
            mu_new = mu_acc[i] + mu_o[j]
            w_new = mu_new + k_alpha * math.sqrt(var_new)
            if w_new <= caps[i]:
                old_w = w_acc[i]
                mu_acc[i], var_acc[i], w_acc[i] = mu_new, var_new, w_new
                dfs(j + 1, profit_now + prof_o[j])
                mu_acc[i] -= mu_o[j]
                var_acc[i] -= var_o[j]
                w_acc[i] = old_w
                if state["interrupted"]:
                    return
        dfs(j + 1, profit_now)

    dfs(0, 0.0)

    profit = int(round(state["incumbent"]))
    if state["interrupted"]:
        gap = max(0.0, root_bound - state["incumbent"]) / max(1.0, state["incumbent"])
        return BaselineOptimum(instance_id(instance), profit, "GREEDY_LB", gap)
    return BaselineOptimum(instance_id(instance), profit, "EXACT_BB", 0.0)


def greedy_baseline(
    instance: Instance,
    conf: ConfidenceLevel,
    capacities: Sequence[float] | None = None,
) -> BaselineOptimum:
    """Density-ordered first-fit lower bound; gap is the root-relaxation gap."""
    caps = _capacity_array(instance, capacities)
    _, profit = _greedy_assignment(instance, conf, caps)
    density = instance.profits / instance.mean_weights
    order = np.argsort(-density, kind="stable")
    bound = _fractional_bound(
        0.0, 0, float(caps.sum()), instance.mean_weights[order], instance.profits[order]
    )
    gap = max(0.0, bound - profit) / max(1.0, profit)
    return BaselineOptimum(instance_id(instance), int(round(profit)), "GREEDY_LB", gap)


def write_baselines(baselines: Iterable[BaselineOptimum], path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        for b in baselines:
            fh.write(f"{b.instance_id} {b.profit} {b.method} {b.gap!r}\n")
    os.replace(tmp, path)


def read_baselines(path: str) -> dict[str, BaselineOptimum]:
    """Baseline lines `<instance_id> <profit> <method> <gap>`; '#' comments."""
    out: dict[str, BaselineOptimum] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(
                    f"{path}:{lineno}: expected 4 fields, got {len(parts)}"
                )
            try:
                b = BaselineOptimum(parts[0], int(parts[1]), parts[2], float(parts[3]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            out[b.instance_id] = b
    return out
