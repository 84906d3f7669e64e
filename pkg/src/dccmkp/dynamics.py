"""Dynamic capacity schedules and the adaptive mutation rate controller.

Capacities change nu times after a warm-up period, every tau evaluations.
Each change rescales a random subset of knapsacks by factors in
[1 - eta, 1 + eta] relative to the *base* capacities; unselected knapsacks
snap back to base, so capacities never drift outside the band. All events are
drawn up-front, making schedules replayable and pure to query.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace

import numpy as np

from ._rng import substream


@dataclass(frozen=True)
class ChangeEvent:
    at_evaluation: int
    selected: frozenset[int]
    multipliers: dict[int, float]
    new_capacities: tuple[float, ...]


@dataclass(frozen=True)
class DynamicSchedule:
    base_capacities: tuple[float, ...]
    eta: float
    num_changes: int
    tau_evaluations: int
    warmup_evaluations: int
    change_log: tuple[ChangeEvent, ...]
    seed: int

    @property
    def boundaries(self) -> tuple[int, ...]:
        return tuple(ev.at_evaluation for ev in self.change_log)


def make_schedule(
    base_capacities,
    eta: float,
    num_changes: int,
    budget: int,
    warmup: int,
    seed: int,
) -> DynamicSchedule:
    """Pre-draw all change events for one run.

    Boundaries sit at warmup + k*tau for k = 0..nu-1 with
    tau = (budget - warmup) // nu, so exactly nu changes fall inside the
    budget. Knapsacks join a change independently with probability 1/2
    (redrawn if the subset comes out empty).
    """
    base = tuple(float(b) for b in base_capacities)
    m = len(base)
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    if num_changes < 1:
        raise ValueError("num_changes must be >= 1")
    if warmup < 0 or budget <= warmup:
        raise ValueError("need 0 <= warmup < budget")
    tau = (budget - warmup) // num_changes
    if tau < 1:
        raise ValueError("budget leaves less than one evaluation per change")
    rng = substream(seed, "schedule")
    events = []
    for k in range(num_changes):
        included = rng.random(m) < 0.5
        while not included.any():
            included = rng.random(m) < 0.5
        # Knapsack identity is 1-based throughout, matching the gene encoding.
        selected = frozenset(int(i) + 1 for i in np.flatnonzero(included))
        factors = rng.uniform(1.0 - eta, 1.0 + eta, size=len(selected))
        multipliers = {
            i: float(r) for i, r in zip(sorted(selected), factors)
        }
        new_caps = tuple(
            base[i] * multipliers[i + 1] if (i + 1) in selected else base[i]
            for i in range(m)
        )
        events.append(
            ChangeEvent(
                at_evaluation=warmup + k * tau,
                selected=selected,
                multipliers=multipliers,
                new_capacities=new_caps,
            )
        )
    return DynamicSchedule(
        base_capacities=base,
        eta=eta,
        num_changes=num_changes,
        tau_evaluations=tau,
        warmup_evaluations=warmup,
        change_log=tuple(events),
        seed=seed,
    )


def capacities_at(schedule: DynamicSchedule, evaluation_count: int) -> tuple[float, ...]:
    """Capacities in force at the given evaluation count."""
    if evaluation_count < 0:
        raise ValueError("evaluation_count must be >= 0")
    k = bisect_right(schedule.boundaries, evaluation_count)
    if k == 0:
        return schedule.base_capacities
    return schedule.change_log[k - 1].new_capacities


def event_to_dict(ev: ChangeEvent) -> dict:
    return {
        "at_evaluation": ev.at_evaluation,
        "selected": sorted(ev.selected),
        "multipliers": {str(i): ev.multipliers[i] for i in sorted(ev.multipliers)},
        "new_capacities": list(ev.new_capacities),
    }


@dataclass(frozen=True)
class DamrsState:
    """Adaptive mutation rate: doubled after a change that kills feasibility.

    p_m stays at its initial value except in the adaptation window between a
    change with zero feasible members and the feasible count reaching the
    threshold; the doubling is applied once per change, never compounded.
    """

    p_m_initial: float
    p_m_current: float
    threshold: int
    is_adapt: bool = False


def initial_damrs(p_m: float, population_size: int) -> DamrsState:
    return DamrsState(
        p_m_initial=p_m,
        p_m_current=p_m,
        threshold=int(0.3 * population_size),
        is_adapt=False,
    )


def damrs_step(state: DamrsState, changed: bool, feasible_count: int) -> DamrsState:
    """One controller transition; pure, returns the next state."""
    if feasible_count < 0:
        raise ValueError("feasible_count must be >= 0")
    if changed:
        if feasible_count == 0:
            return replace(
                state, p_m_current=2.0 * state.p_m_initial, is_adapt=True
            )
        return replace(state, p_m_current=state.p_m_initial, is_adapt=False)
    if state.is_adapt and feasible_count >= state.threshold:
        return replace(state, p_m_current=state.p_m_initial, is_adapt=False)
    return state
