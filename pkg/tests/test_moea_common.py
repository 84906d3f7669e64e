import numpy as np
import pytest

from dccmkp._rng import substream
from dccmkp.moea.common import (
    AlgorithmConfig,
    binary_tournament,
    crowding_distance,
    das_dennis,
    fast_nondominated_sort,
    neighbor_table,
    tchebycheff,
)
from dccmkp.objectives import Fitness


def _fit(f1, f2):
    return Fitness(f1=f1, f2=float(f2), feasible=f1 >= 0,
                   violation=max(0.0, float(-f1)), profit=max(0, int(f1)),
                   chance_weight_sum=float(f2))


# --- independent dominance-peeling oracle (minimization frame) ---------------

def _dominates_min(p, q):
    return (p[0] <= q[0] and p[1] <= q[1]) and (p[0] < q[0] or p[1] < q[1])


def _peel_fronts(G):
    remaining = set(range(len(G)))
    fronts = []
    while remaining:
        front = sorted(
            i for i in remaining
            if not any(_dominates_min(G[j], G[i]) for j in remaining if j != i)
        )
        fronts.append(front)
        remaining -= set(front)
    return fronts


def test_sort_singleton():
    assert fast_nondominated_sort([_fit(1, 1)]) == [[0]]


def test_sort_pareto_chain_single_front():
    # Profit rises with chance weight: mutually non-dominated trade-offs.
    fits = [_fit(4, 3), _fit(5, 4), _fit(6, 5)]
    assert fast_nondominated_sort(fits) == [[0, 1, 2]]
    # A point better on both axes pushes the rest into later fronts.
    fits = [_fit(6, 3), _fit(5, 4), _fit(4, 5)]
    assert fast_nondominated_sort(fits) == [[0], [1], [2]]


def test_sort_empty():
    assert fast_nondominated_sort([]) == []


def test_sort_matches_peeling_oracle():
    rng = substream(17, "sort-oracle")
    for _ in range(100):
        n = int(rng.integers(1, 50))
        f1 = rng.integers(-20, 60, size=n)
        f2 = rng.uniform(0, 50, size=n)
        fits = [_fit(int(a), float(b)) for a, b in zip(f1, f2)]
        G = np.column_stack([-f1.astype(float), f2])
        expected = _peel_fronts(G)
        got = [sorted(fr) for fr in fast_nondominated_sort(fits)]
        assert got == expected


def test_sort_every_index_exactly_once():
    rng = substream(23, "sort-partition")
    f1 = rng.integers(0, 10, size=40)
    f2 = rng.uniform(0, 10, size=40)
    fronts = fast_nondominated_sort(
        [_fit(int(a), float(b)) for a, b in zip(f1, f2)]
    )
    flat = sorted(i for fr in fronts for i in fr)
    assert flat == list(range(40))


# --- crowding distance --------------------------------------------------------

def test_crowding_small_fronts_all_infinite():
    assert crowding_distance([_fit(1, 1)]) == [float("inf")]
    assert crowding_distance([_fit(1, 2), _fit(2, 1)]) == [float("inf")] * 2


def test_crowding_collinear_middle_is_two():
    # Equally spaced on both objectives: middle point gets 1.0 + 1.0.
    fits = [_fit(4, 2), _fit(3, 3), _fit(2, 4)]
    d = crowding_distance(fits)
    assert d[0] == float("inf") and d[2] == float("inf")
    assert d[1] == pytest.approx(2.0)


def test_crowding_constant_objective_contributes_zero():
    fits = [_fit(4, 5), _fit(3, 5), _fit(2, 5)]
    d = crowding_distance(fits)
    assert d[1] == pytest.approx(1.0)  # only the varying objective counts


def test_crowding_requires_nonempty():
    with pytest.raises(ValueError):
        crowding_distance([])


# --- Tchebycheff scalarization -------------------------------------------------

def test_tchebycheff_on_axis_is_zero():
    fit = _fit(5, 123.0)
    z = (-5.0, 0.0)
    assert tchebycheff(fit, (1.0, 0.0), z) == pytest.approx(0.0)


def test_tchebycheff_hand_value():
    # Minimization-frame point (2, 4) with even weights and origin ideal.
    fit = _fit(-2, 4.0)
    assert tchebycheff(fit, (0.5, 0.5), (0.0, 0.0)) == pytest.approx(2.0)


def test_tchebycheff_translation_invariance_of_argmin():
    rng = substream(31, "tcheby")
    lam = (0.3, 0.7)
    cands = [_fit(int(a), float(b))
             for a, b in zip(rng.integers(0, 50, 20), rng.uniform(0, 50, 20))]
    z = (-60.0, -1.0)
    base = [tchebycheff(f, lam, z) for f in cands]
    c = 17.5
    shifted = [
        tchebycheff(_fit(f.f1 - c, f.f2 + c), lam, (z[0] + c, z[1] + c))
        for f in cands
    ]
    assert int(np.argmin(base)) == int(np.argmin(shifted))


# --- weight lattice and neighbors ---------------------------------------------

def test_das_dennis_two_objective_lattice():
    W = das_dennis(99)
    assert W.shape == (100, 2)
    assert np.allclose(W.sum(axis=1), 1.0)
    assert len(np.unique(W[:, 0])) == 100
    diffs = np.diff(np.sort(W[:, 0]))
    assert np.allclose(diffs, 1.0 / 99)


def test_das_dennis_three_objective_count():
    W = das_dennis(4, objectives=3)
    assert W.shape == (15, 3)  # C(4+2, 2)
    assert np.allclose(W.sum(axis=1), 1.0)


def test_neighbor_table_contains_self_first():
    W = das_dennis(9)
    T = neighbor_table(W, 3)
    assert T.shape == (10, 3)
    assert np.array_equal(T[:, 0], np.arange(10))


def test_binary_tournament_prefers_lower_rank():
    rank = np.array([0, 5])
    tie = np.array([0.0, 100.0])
    rng = substream(3, "tour")
    picks = binary_tournament(rank, tie, 2000, rng)
    assert set(np.unique(picks)) <= {0, 1}
    # Index 1 can only win when drawn against itself (expected rate 1/4).
    assert (picks == 0).sum() > 1400


def test_algorithm_config_validation():
    with pytest.raises(ValueError):
        AlgorithmConfig(algorithm="GA")
    with pytest.raises(ValueError):
        AlgorithmConfig(algorithm="MOEAD", population_size=1)
    cfg = AlgorithmConfig(algorithm="SPEA2", population_size=40)
    assert cfg.spea2_archive_size == 40
