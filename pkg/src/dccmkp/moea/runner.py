"""Generation loop shared by all four optimizers.

The driver advances a stepper in population-sized evaluation slices,
interleaving capacity changes from a pre-drawn schedule: at each boundary it
records a pre-change snapshot, installs the new capacities (re-evaluating
retained members, optionally charged to the budget), and feeds the mutation
controller. A final snapshot is always appended, so a run with nu changes
carries nu + 1 snapshots and a static run exactly one.
"""
from __future__ import annotations

import hashlib
from typing import Callable

import numpy as np

from .. import _kernels
from .._rng import substream
from ..dynamics import DamrsState, DynamicSchedule, damrs_step, initial_damrs
from ..evaluation import FrontMember, RunRecord, Snapshot
from ..instance import Instance, instance_id
from ..stochastic import ConfidenceLevel
from ._stepper import BaseStepper
from .common import AlgorithmConfig
from .moead import MoeadStepper
from .nsga2 import Nsga2Stepper
from .nsga3 import Nsga3Stepper
from .spea2 import Spea2Stepper

_STEPPERS: dict[str, type[BaseStepper]] = {
    "MOEAD": MoeadStepper,
    "NSGA2": Nsga2Stepper,
    "NSGA3": Nsga3Stepper,
    "SPEA2": Spea2Stepper,
}

Observer = Callable[[Snapshot], None]


def _config_digest(instance: Instance, conf: ConfidenceLevel,
                   config: AlgorithmConfig, schedule: DynamicSchedule | None) -> str:
    parts = [
        instance_id(instance),
        repr(conf.alpha),
        config.algorithm,
        str(config.population_size),
        str(config.budget_evaluations),
        str(config.moead_replacement_limit),
        repr(config.moead_neighbor_selection_prob),
        str(config.nsga3_reference_count),
        str(config.spea2_archive_size),
        repr(config.variation),
        str(config.seed),
        str(config.count_change_reevaluations),
        "static" if schedule is None else (
            f"eta={schedule.eta!r} nu={schedule.num_changes} "
            f"tau={schedule.tau_evaluations} warmup={schedule.warmup_evaluations} "
            f"seed={schedule.seed}"
        ),
    ]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


def _snapshot(stepper: BaseStepper, evaluations: int) -> Snapshot:
    _, G, viol = stepper.retained()
    feasible = viol == 0.0
    best = float(-G[feasible, 0].min()) if feasible.any() else None
    return Snapshot(
        evaluations=evaluations,
        best_profit=best,
        min_violation=float(viol.min()),
        capacities=tuple(float(c) for c in stepper.caps),
    )


def _final_front(stepper: BaseStepper) -> tuple[FrontMember, ...]:
    genes, G, viol = stepper.retained()
    feasible = np.where(viol == 0.0)[0]
    if len(feasible) == 0:
        return ()
    sub = np.ascontiguousarray(G[feasible])
    rank = _kernels.nd_rank(sub)
    members: list[FrontMember] = []
    seen: set[bytes] = set()
    for pos in np.where(rank == 0)[0]:
        idx = feasible[pos]
        key = genes[idx].tobytes()
        if key in seen:
            continue
        seen.add(key)
        members.append(FrontMember(
            genes=tuple(int(g) for g in genes[idx]),
            profit=float(-G[idx, 0]),
            chance_weight_sum=float(G[idx, 1]),
        ))
    members.sort(key=lambda fm: (-fm.profit, fm.chance_weight_sum, fm.genes))
    return tuple(members)


def run(
    instance: Instance,
    conf: ConfidenceLevel,
    config: AlgorithmConfig,
    schedule: DynamicSchedule | None = None,
    observer: Observer | None = None,
) -> RunRecord:
    """Execute one seeded optimization run and return its full record."""
    budget = config.budget_evaluations
    if budget < config.population_size:
        raise ValueError(
            "configuration error: budget_evaluations is smaller than population_size"
        )
    if schedule is not None:
        if tuple(schedule.base_capacities) != tuple(instance.capacities):
            raise ValueError("schedule base capacities do not match the instance")
        if schedule.boundaries and schedule.boundaries[-1] >= budget:
            raise ValueError("schedule boundaries extend beyond the evaluation budget")

    rng = substream(config.seed, f"moea/{config.algorithm}")
    stepper = _STEPPERS[config.algorithm](instance, conf, config, rng)
    counter = stepper.init_evaluations

    damrs: DamrsState = initial_damrs(
        config.variation.mutation_prob, config.population_size
    )
    boundaries = schedule.boundaries if schedule is not None else ()
    events = schedule.change_log if schedule is not None else ()
    next_change = 0
    snapshots: list[Snapshot] = []

    def cross_boundaries() -> None:
        nonlocal counter, next_change, damrs
        while next_change < len(boundaries) and counter >= boundaries[next_change]:
            snap = _snapshot(stepper, counter)
            snapshots.append(snap)
            if observer is not None:
                observer(snap)
            cost = stepper.apply_change(
                np.asarray(events[next_change].new_capacities, dtype=np.float64)
            )
            if config.count_change_reevaluations:
                counter += cost
            damrs = damrs_step(damrs, changed=True,
                               feasible_count=stepper.feasible_count())
            next_change += 1

    while counter < budget:
        before = next_change
        cross_boundaries()
        if next_change == before and damrs.is_adapt:
            damrs = damrs_step(damrs, changed=False,
                               feasible_count=stepper.feasible_count())
        counter += stepper.step(damrs.p_m_current)

    # A boundary inside the final stride still produces its change and
    # snapshot, keeping the snapshot count at nu + 1.
    cross_boundaries()
    snapshots.append(_snapshot(stepper, counter))

    return RunRecord(
        seed=config.seed,
        config_digest=_config_digest(instance, conf, config, schedule),
        instance_id=instance_id(instance),
        algorithm=config.algorithm,
        alpha=conf.alpha,
        variance_regime=instance.variance_regime,
        eta=None if schedule is None else schedule.eta,
        num_changes=0 if schedule is None else schedule.num_changes,
        snapshots=tuple(snapshots),
        final_front=_final_front(stepper),
        evaluations_total=counter,
        budget=budget,
    )
