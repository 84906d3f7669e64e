"""Reference-direction dominance sorter with niche-count selection.

Parents are drawn uniformly at random; survival admits whole fronts and then
fills the remainder from the split front by associating members to uniform
reference directions and repeatedly serving the direction with the lowest
niche count. If the fronts fit exactly, niching is skipped.
"""
from __future__ import annotations

import numpy as np

from .. import _kernels
from ._stepper import BaseStepper
from .common import das_dennis

_ASF_EPS = 1e-6
_INTERCEPT_EPS = 1e-10


def reference_directions(count: int) -> np.ndarray:
    """`count` uniformly spaced two-objective directions on the simplex."""
    if count < 2:
        raise ValueError("need at least 2 reference directions")
    return das_dennis(count - 1)


def _normalize(G: np.ndarray) -> np.ndarray:
    ideal = G.min(axis=0)
    T = G - ideal
    span = T.max(axis=0)

    # Extreme point per axis by the achievement scalarizing function.
    extremes = np.empty(2, dtype=np.int64)
    for axis in range(2):
        w = np.full(2, _ASF_EPS)
        w[axis] = 1.0
        asf = (T / w).max(axis=1)
        extremes[axis] = int(np.argmin(asf))
    E = T[extremes]

    intercepts = None
    try:
        sol = np.linalg.solve(E, np.ones(2))
        with np.errstate(divide="ignore", over="ignore"):
            cand = 1.0 / sol
        if np.all(np.isfinite(cand)) and np.all(cand > _INTERCEPT_EPS):
            intercepts = cand
    except np.linalg.LinAlgError:
        pass
    if intercepts is None:
        intercepts = span.copy()
    intercepts = np.where(intercepts > _INTERCEPT_EPS, intercepts, 1.0)
    return T / intercepts


def _associate(normalized: np.ndarray, refs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closest reference direction per member by perpendicular distance."""
    unit = refs / np.linalg.norm(refs, axis=1, keepdims=True)
    proj = normalized @ unit.T
    sq = (normalized * normalized).sum(axis=1, keepdims=True) - proj * proj
    dist = np.sqrt(np.maximum(sq, 0.0))
    which = dist.argmin(axis=1)
    return which, dist[np.arange(len(normalized)), which]


def environmental_selection(
    G: np.ndarray,
    refs: np.ndarray,
    n_select: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Indices of the survivors, in admission order."""
    total = G.shape[0]
    if n_select > total:
        raise ValueError("cannot select more members than provided")
    rank = _kernels.nd_rank(G)
    order = np.argsort(rank, kind="stable")
    counts = np.bincount(rank)
    admitted: list[int] = []
    taken = 0
    split_rank = -1
    for r, c in enumerate(counts):
        if taken + c <= n_select:
            admitted.extend(int(i) for i in order[taken : taken + int(c)])
            taken += int(c)
            if taken == n_select:
                return np.array(admitted, dtype=np.int64)
        else:
            split_rank = r
            break

    split = [int(i) for i in np.where(rank == split_rank)[0]]
    pool = np.array(admitted + split, dtype=np.int64)
    normalized = _normalize(G[pool])
    assoc, dist = _associate(normalized, refs)

    R = refs.shape[0]
    niche = np.zeros(R, dtype=np.int64)
    for pos in range(len(admitted)):
        niche[assoc[pos]] += 1

    # Positions within `pool` of the split-front members still available.
    avail_by_ref: dict[int, list[int]] = {}
    for pos in range(len(admitted), len(pool)):
        avail_by_ref.setdefault(int(assoc[pos]), []).append(pos)

    excluded = np.zeros(R, dtype=bool)
    chosen: list[int] = []
    need = n_select - len(admitted)
    while len(chosen) < need:
        active = np.where(~excluded)[0]
        min_count = niche[active].min()
        candidates = active[niche[active] == min_count]
        r = int(candidates[rng.integers(0, len(candidates))])
        members = avail_by_ref.get(r, [])
        if not members:
            excluded[r] = True
            continue
        if niche[r] == 0:
            best = min(range(len(members)), key=lambda t: (dist[members[t]], t))
        else:
            best = int(rng.integers(0, len(members)))
        pos = members.pop(best)
        chosen.append(int(pool[pos]))
        niche[r] += 1

    return np.array(admitted + chosen, dtype=np.int64)


class Nsga3Stepper(BaseStepper):
    def __init__(self, instance, conf, config, rng) -> None:
        super().__init__(instance, conf, config, rng)
        self.refs = reference_directions(config.nsga3_reference_count)

    def step(self, mutation_prob: float) -> int:
        parent_idx = self.rng.integers(0, self.N, size=self.N)
        kid_genes, kid_G, kid_viol = self._variation(self.genes, parent_idx, mutation_prob)
        all_genes = np.concatenate([self.genes, kid_genes])
        all_G = np.concatenate([self.G, kid_G])
        all_viol = np.concatenate([self.viol, kid_viol])
        keep = environmental_selection(all_G, self.refs, self.N, self.rng)
        self.genes = np.ascontiguousarray(all_genes[keep])
        self.G = np.ascontiguousarray(all_G[keep])
        self.viol = np.ascontiguousarray(all_viol[keep])
        return self.N
