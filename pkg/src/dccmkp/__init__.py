"""Bi-objective chance-constrained dynamic multiple-knapsack toolkit.

Library layout: instance generation and file I/O (`instance`), the exact
probabilistic-constraint reformulation (`stochastic`), integer-vector
encoding and variation operators (`encoding`), penalized bi-objective
evaluation (`objectives`), capacity-change schedules and adaptive mutation
(`dynamics`), four population optimizers plus the run driver (`moea`),
ground-truth solvers (`oracle`), metrics and rank statistics (`evaluation`),
and the experiment harness (`config`, `cli`).
"""

__version__ = "0.1.0"

from .dynamics import (
    ChangeEvent,
    DamrsState,
    DynamicSchedule,
    capacities_at,
    damrs_step,
    initial_damrs,
    make_schedule,
)
from .encoding import (
    Solution,
    VariationConfig,
    decode,
    encode,
    polynomial_mutation,
    random_solution,
    sbx_crossover,
)
from .evaluation import (
    ComparisonReport,
    FrontMember,
    OfflineError,
    RunRecord,
    Snapshot,
    best_profit,
    bonferroni_posthoc,
    compare_groups,
    kruskal_wallis,
    offline_error,
)
from .instance import (
    Instance,
    InstanceError,
    Item,
    generate,
    instance_id,
    read_instance,
    write_instance,
)
from .moea.common import (
    ALGORITHMS,
    AlgorithmConfig,
    crowding_distance,
    fast_nondominated_sort,
    tchebycheff,
)
from .moea.nsga3 import environmental_selection as nsga3_environmental_selection
from .moea.nsga3 import reference_directions
from .moea.runner import run
from .moea.spea2 import spea2_fitness
from .objectives import EvaluationCounter, Fitness, dominates, evaluate, to_min_frame
from .oracle import (
    BaselineOptimum,
    branch_and_bound_optimum,
    exhaustive_optimum,
    greedy_baseline,
    read_baselines,
    write_baselines,
)
from .stochastic import (
    ConfidenceLevel,
    KnapsackLoad,
    knapsack_loads,
    monte_carlo_feasibility,
    normal_quantile,
    standard_normal_cdf,
    violation,
)

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "BaselineOptimum",
    "ChangeEvent",
    "ComparisonReport",
    "ConfidenceLevel",
    "DamrsState",
    "DynamicSchedule",
    "EvaluationCounter",
    "Fitness",
    "FrontMember",
    "Instance",
    "InstanceError",
    "Item",
    "KnapsackLoad",
    "OfflineError",
    "RunRecord",
    "Snapshot",
    "Solution",
    "VariationConfig",
    "best_profit",
    "bonferroni_posthoc",
    "branch_and_bound_optimum",
    "capacities_at",
    "compare_groups",
    "crowding_distance",
    "damrs_step",
    "decode",
    "dominates",
    "encode",
    "evaluate",
    "exhaustive_optimum",
    "fast_nondominated_sort",
    "generate",
    "greedy_baseline",
    "initial_damrs",
    "instance_id",
    "knapsack_loads",
    "kruskal_wallis",
    "make_schedule",
    "monte_carlo_feasibility",
    "normal_quantile",
    "nsga3_environmental_selection",
    "offline_error",
    "polynomial_mutation",
    "random_solution",
    "read_baselines",
    "read_instance",
    "reference_directions",
    "run",
    "sbx_crossover",
    "spea2_fitness",
    "standard_normal_cdf",
    "tchebycheff",
    "to_min_frame",
    "violation",
    "write_baselines",
    "write_instance",
]
