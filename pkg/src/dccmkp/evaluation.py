"""Run records, reporting metrics, and nonparametric comparison tests.

A RunRecord is the complete, serializable outcome of one optimization run.
Metrics reduce records to the two reported quantities (best obtained profit
and mean offline error); the statistics half wraps rank-based group
comparison (Kruskal-Wallis followed by pairwise Bonferroni-adjusted
rank-sum tests with direction markers).
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats as _sstats

from .oracle import BaselineOptimum

CSV_HEADER = (
    "instance,algorithm,alpha,variance_regime,eta,nu,seed,best_profit,mean_epsilon"
)
CSV_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Snapshot:
    """Population state captured just before a change (or at termination)."""

    evaluations: int
    best_profit: float | None
    min_violation: float
    capacities: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.best_profit is None and self.min_violation <= 0.0:
            raise ValueError("no feasible member implies a positive violation")


@dataclass(frozen=True)
class FrontMember:
    genes: tuple[int, ...]
    profit: float
    chance_weight_sum: float


@dataclass(frozen=True)
class RunRecord:
    seed: int
    config_digest: str
    instance_id: str
    algorithm: str
    alpha: float
    variance_regime: str
    eta: float | None
    num_changes: int
    snapshots: tuple[Snapshot, ...]
    final_front: tuple[FrontMember, ...]
    evaluations_total: int
    budget: int

    def __post_init__(self) -> None:
        if len(self.snapshots) != self.num_changes + 1:
            raise ValueError(
                f"expected {self.num_changes + 1} snapshots, got {len(self.snapshots)}"
            )


@dataclass(frozen=True)
class OfflineError:
    epsilon_per_change: tuple[float, ...]
    mean_epsilon: float
    baselines: tuple[BaselineOptimum, ...]


def best_profit(record: RunRecord) -> int:
    """Highest profit on the final feasible front; 0 when the front is empty."""
    if not record.final_front:
        return 0
    return int(round(max(fm.profit for fm in record.final_front)))


def offline_error(
    record: RunRecord,
    baselines: BaselineOptimum | Sequence[BaselineOptimum],
) -> OfflineError:
    """Per-period error against the static optimum of each period's capacities.

    For a dynamic run, one baseline per change period is required, aligned
    with the pre-change snapshots; the after-the-last-change period is not
    scored. A static run is scored on its single snapshot.
    """
    if isinstance(baselines, BaselineOptimum):
        baselines = (baselines,)
    baselines = tuple(baselines)
    scored = record.snapshots[:-1] if record.num_changes else record.snapshots
    if len(baselines) != len(scored):
        raise ValueError(
            f"need {len(scored)} period baselines, got {len(baselines)}"
        )
    eps: list[float] = []
    for snap, base in zip(scored, baselines):
        if snap.best_profit is not None:
            eps.append(base.profit - snap.best_profit)
        else:
            eps.append(base.profit + snap.min_violation)
    return OfflineError(
        epsilon_per_change=tuple(eps),
        mean_epsilon=sum(eps) / len(eps),
        baselines=baselines,
    )


# --- statistics -------------------------------------------------------------

def kruskal_wallis(groups: Sequence[Sequence[float]]) -> tuple[float, bool]:
    """Tie-corrected H over k groups and its 0.05 chi-square significance.

    All observations identical across every group gives (0, False) instead of
    the undefined rank statistic.
    """
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    for g in arrays:
        if g.size == 0:
            raise ValueError("groups must be non-empty")
    pooled = np.concatenate(arrays)
    if np.ptp(pooled) == 0.0:
        return 0.0, False
    h, p = _sstats.kruskal(*arrays)
    return float(h), bool(p < 0.05)


def bonferroni_posthoc(
    groups: Sequence[Sequence[float]], family_alpha: float = 0.05
) -> list[list[str]]:
    """Pairwise rank-sum markers at the Bonferroni-adjusted level.

    markers[a][b] is '+' when group a's values are significantly larger than
    group b's (by pooled mean rank), '-' when significantly smaller, and '*'
    otherwise (including the diagonal). Callers are expected to gate on an
    overall Kruskal-Wallis test; with no gate, identical groups simply come
    out all '*'.
    """
    k = len(groups)
    if k < 2:
        raise ValueError("need at least two groups")
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    for g in arrays:
        if g.size == 0:
            raise ValueError("groups must be non-empty")
    level = family_alpha / math.comb(k, 2)
    markers = [["*"] * k for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            pooled = np.concatenate([arrays[a], arrays[b]])
            if np.ptp(pooled) == 0.0:
                continue
            _, p = _sstats.mannwhitneyu(arrays[a], arrays[b],
                                        alternative="two-sided")
            if p >= level:
                continue
            ranks = _sstats.rankdata(pooled)
            mean_a = ranks[: arrays[a].size].mean()
            mean_b = ranks[arrays[a].size :].mean()
            if mean_a > mean_b:
                markers[a][b], markers[b][a] = "+", "-"
            else:
                markers[a][b], markers[b][a] = "-", "+"
    return markers


@dataclass(frozen=True)
class ComparisonReport:
    """One Kruskal-Wallis family with gated pairwise markers."""

    labels: tuple[str, ...]
    h_statistic: float
    significant: bool
    markers: tuple[tuple[str, ...], ...]

    def marker_line(self, label: str) -> str:
        """Appendix-style notation, e.g. '2(+) 3(*) 4(-)' for one label."""
        i = self.labels.index(label)
        parts = [
            f"{j + 1}({self.markers[i][j]})"
            for j in range(len(self.labels))
            if j != i
        ]
        return " ".join(parts)


def compare_groups(named_groups: Mapping[str, Sequence[float]]) -> ComparisonReport:
    """Kruskal-Wallis gate plus pairwise markers over labeled groups.

    Without overall significance every off-diagonal marker is '*'.
    """
    labels = tuple(named_groups.keys())
    groups = [named_groups[name] for name in labels]
    h, significant = kruskal_wallis(groups)
    if significant:
        markers = bonferroni_posthoc(groups)
    else:
        markers = [["*"] * len(labels) for _ in labels]
    return ComparisonReport(
        labels=labels,
        h_statistic=h,
        significant=significant,
        markers=tuple(tuple(row) for row in markers),
    )


# --- serialization ----------------------------------------------------------

def record_to_dict(record: RunRecord) -> dict:
    return {
        "schema_version": CSV_SCHEMA_VERSION,
        "seed": record.seed,
        "config_digest": record.config_digest,
        "instance_id": record.instance_id,
        "algorithm": record.algorithm,
        "alpha": record.alpha,
        "variance_regime": record.variance_regime,
        "eta": record.eta,
        "num_changes": record.num_changes,
        "evaluations_total": record.evaluations_total,
        "budget": record.budget,
        "snapshots": [
            {
                "evaluations": s.evaluations,
                "best_profit": s.best_profit,
                "min_violation": s.min_violation,
                "capacities": list(s.capacities),
            }
            for s in record.snapshots
        ],
        "final_front": [
            {
                "genes": list(fm.genes),
                "profit": fm.profit,
                "chance_weight_sum": fm.chance_weight_sum,
            }
            for fm in record.final_front
        ],
    }


def write_record(record: RunRecord, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(record_to_dict(record), fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


@dataclass(frozen=True)
class ResultRow:
    instance: str
    algorithm: str
    alpha: float
    variance_regime: str
    eta: float | None
    nu: int | None
    seed: int
    best_profit: int
    mean_epsilon: float | None

    def sort_key(self) -> tuple:
        return (
            self.instance,
            self.algorithm,
            self.alpha,
            self.variance_regime,
            -1.0 if self.eta is None else self.eta,
            -1 if self.nu is None else self.nu,
            self.seed,
        )

    def to_csv(self) -> str:
        return ",".join(
            [
                self.instance,
                self.algorithm,
                repr(self.alpha),
                self.variance_regime,
                "" if self.eta is None else repr(self.eta),
                "" if self.nu is None else str(self.nu),
                str(self.seed),
                str(self.best_profit),
                "" if self.mean_epsilon is None else repr(self.mean_epsilon),
            ]
        )


def result_row(record: RunRecord, offline: OfflineError | None = None) -> ResultRow:
    return ResultRow(
        instance=record.instance_id,
        algorithm=record.algorithm,
        alpha=record.alpha,
        variance_regime=record.variance_regime,
        eta=record.eta,
        nu=record.num_changes if record.num_changes else None,
        seed=record.seed,
        best_profit=best_profit(record),
        mean_epsilon=None if offline is None else offline.mean_epsilon,
    )


def write_results_csv(rows: Sequence[ResultRow], path: str) -> None:
    """Canonically sorted CSV; byte-identical across reruns of one config."""
    ordered = sorted(rows, key=lambda r: r.sort_key())
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in ordered:
            fh.write(row.to_csv() + "\n")
    os.replace(tmp, path)


def read_results_csv(path: str) -> list[ResultRow]:
    rows: list[ResultRow] = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected results header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 9:
                raise ValueError(f"{path}:{lineno}: expected 9 fields")
            rows.append(
                ResultRow(
                    instance=parts[0],
                    algorithm=parts[1],
                    alpha=float(parts[2]),
                    variance_regime=parts[3],
                    eta=float(parts[4]) if parts[4] else None,
                    nu=int(parts[5]) if parts[5] else None,
                    seed=int(parts[6]),
                    best_profit=int(parts[7]),
                    mean_epsilon=float(parts[8]) if parts[8] else None,
                )
            )
    return rows
