"""Population optimizers and the shared run driver."""

from .common import (
    ALGORITHMS,
    AlgorithmConfig,
    Individual,
    crowding_distance,
    das_dennis,
    fast_nondominated_sort,
    neighbor_table,
    tchebycheff,
)
from .moead import MoeadStepper
from .nsga2 import Nsga2Stepper
from .nsga3 import Nsga3Stepper, environmental_selection, reference_directions
from .runner import run
from .spea2 import Spea2Stepper, spea2_fitness

__all__ = [
    "ALGORITHMS",
    "AlgorithmConfig",
    "Individual",
    "MoeadStepper",
    "Nsga2Stepper",
    "Nsga3Stepper",
    "Spea2Stepper",
    "crowding_distance",
    "das_dennis",
    "environmental_selection",
    "fast_nondominated_sort",
    "neighbor_table",
    "reference_directions",
    "run",
    "spea2_fitness",
    "tchebycheff",
]
