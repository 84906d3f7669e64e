"""Problem instances: benchmark generation and the canonical file format.

Instances hold n items with uncertain weights (mean, variance per item) and m
knapsack capacities. Benchmark families FK1/FK3/FK4 are regenerated from their
published distributions; arbitrary instances can be built directly or loaded
from file.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._rng import substream

logger = logging.getLogger(__name__)

SET_LABELS = ("FK1", "FK3", "FK4", "CUSTOM")
CORRELATIONS = ("STRONG", "UNCORRELATED")
VARIANCE_REGIMES = ("V1", "V2", "CUSTOM")

# Published (n, m) combinations per benchmark set; FK4 spans six n/m ratios.
SET_PAIRS: dict[str, tuple[tuple[int, int], ...]] = {
    "FK1": ((100, 10),),
    "FK3": ((300, 30),),
    "FK4": ((300, 150), (225, 75), (240, 60), (375, 75), (300, 50), (500, 50)),
}

# Variance of item j is drawn uniformly from [a*mu_j, b*mu_j].
VARIANCE_BANDS = {"V1": (0.5, 2.0), "V2": (5.0, 10.0)}

MEAN_WEIGHT_RANGE = (10, 1000)
PROFIT_RANGE = (10, 1000)
CAPACITY_RETRY_LIMIT = 1000


class InstanceError(ValueError):
    """Invalid instance data or malformed instance file."""


@dataclass(frozen=True)
class Item:
    profit: int
    mean_weight: int
    variance: float

    def __post_init__(self) -> None:
        if self.profit < 0:
            raise InstanceError(f"profit must be non-negative, got {self.profit}")
        if self.mean_weight <= 0:
            raise InstanceError(f"mean_weight must be positive, got {self.mean_weight}")
        if not self.variance > 0:
            raise InstanceError(f"variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class Instance:
    items: tuple[Item, ...]
    capacities: tuple[float, ...]
    set_label: str = "CUSTOM"
    correlation: str = "STRONG"
    variance_regime: str = "CUSTOM"
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.items) < 1 or len(self.capacities) < 1:
            raise InstanceError("instance needs at least one item and one knapsack")
        if self.set_label not in SET_LABELS:
            raise InstanceError(f"unknown set label {self.set_label!r}")
        if self.correlation not in CORRELATIONS:
            raise InstanceError(f"unknown correlation class {self.correlation!r}")
        if self.variance_regime not in VARIANCE_REGIMES:
            raise InstanceError(f"unknown variance regime {self.variance_regime!r}")
        if any(c <= 0 for c in self.capacities):
            raise InstanceError("capacities must be positive")

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def m(self) -> int:
        return len(self.capacities)

    @cached_property
    def profits(self) -> np.ndarray:
        return np.array([it.profit for it in self.items], dtype=np.float64)

    @cached_property
    def mean_weights(self) -> np.ndarray:
        return np.array([it.mean_weight for it in self.items], dtype=np.float64)

    @cached_property
    def variances(self) -> np.ndarray:
        return np.array([it.variance for it in self.items], dtype=np.float64)

    @cached_property
    def capacity_array(self) -> np.ndarray:
        return np.array(self.capacities, dtype=np.float64)


def instance_id(inst: Instance) -> str:
    return (
        f"{inst.set_label}_{inst.n}_{inst.m}_{inst.correlation}"
        f"_{inst.variance_regime}_s{inst.seed}"
    )


def generate(
    set_label: str,
    n: int,
    m: int,
    correlation: str,
    variance_regime: str,
    seed: int,
) -> Instance:
    """Draw an instance of the given family; deterministic in the seed.

    Mean weights are uniform integers on [10, 1000]; strongly correlated
    profits are mean_weight + 10, uncorrelated profits are independent uniform
    integers on [10, 1000]. Variances are uniform on a regime-dependent band
    proportional to the mean. Capacities B_1..B_{m-1} are uniform on
    [0.4*S/m, 0.6*S/m] with S the total mean weight, and B_m closes the sum to
    exactly 0.5*S. A non-positive closing capacity triggers a full redraw from
    a fresh stream.
    """
    if n < 1 or m < 1:
        raise InstanceError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if set_label not in SET_LABELS:
        raise InstanceError(f"unknown set label {set_label!r}")
    if set_label != "CUSTOM":
        if (n, m) not in SET_PAIRS[set_label]:
            raise InstanceError(
                f"(n={n}, m={m}) is not a published pair for {set_label}; "
                f"valid pairs: {SET_PAIRS[set_label]}"
            )
        if n < m:
            raise InstanceError("benchmark families require n >= m")
    if correlation not in CORRELATIONS:
        raise InstanceError(f"unknown correlation class {correlation!r}")
    if variance_regime not in VARIANCE_BANDS:
        raise InstanceError(
            f"generation requires variance regime V1 or V2, got {variance_regime!r}"
        )

    lo_w, hi_w = MEAN_WEIGHT_RANGE
    mu = substream(seed, "weights").integers(lo_w, hi_w + 1, size=n)

    if correlation == "STRONG":
        profits = mu + 10
    else:
        lo_p, hi_p = PROFIT_RANGE
        profits = substream(seed, "profits").integers(lo_p, hi_p + 1, size=n)

    a, b = VARIANCE_BANDS[variance_regime]
    variances = substream(seed, "variances").uniform(a * mu, b * mu)

    total_mu = float(mu.sum())
    target = 0.5 * total_mu
    lo_c, hi_c = 0.4 * total_mu / m, 0.6 * total_mu / m
    capacities = None
    for attempt in range(CAPACITY_RETRY_LIMIT + 1):
        name = "capacities" if attempt == 0 else f"capacities/retry{attempt}"
        head = substream(seed, name).uniform(lo_c, hi_c, size=m - 1)
        last = target - float(head.sum())
        if last > 0:
            capacities = tuple(float(c) for c in head) + (last,)
            if attempt > 0:
                logger.info(
                    "capacity redraw for seed %d succeeded after %d retries",
                    seed,
                    attempt,
                )
            break
    if capacities is None:
        raise InstanceError(
            f"closing capacity stayed non-positive after {CAPACITY_RETRY_LIMIT} redraws"
        )

    items = tuple(
        Item(profit=int(p), mean_weight=int(w), variance=float(v))
        for p, w, v in zip(profits, mu, variances)
    )
    return Instance(
        items=items,
        capacities=capacities,
        set_label=set_label,
        correlation=correlation,
        variance_regime=variance_regime,
        seed=seed,
    )


_HEADER = "DCCMKP v1"


def write_instance(inst: Instance, path: str | os.PathLike) -> None:
    """Write the canonical text format; atomic on POSIX (tmp file + rename)."""
    lines = [
        _HEADER,
        f"{inst.set_label} {inst.correlation} {inst.variance_regime} {inst.seed}",
        f"{inst.n} {inst.m}",
        " ".join(f"{c:.17g}" for c in inst.capacities),
    ]
    for it in inst.items:
        lines.append(f"{it.profit} {it.mean_weight} {it.variance:.17g}")
    text = "\n".join(lines) + "\n"
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def read_instance(path: str | os.PathLike) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.readlines()
    lines: list[tuple[int, str]] = []
    for idx, line in enumerate(raw, start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            lines.append((idx, stripped))

    def fail(lineno: int, msg: str) -> InstanceError:
        return InstanceError(f"{os.fspath(path)}:{lineno}: {msg}")

    if not lines or lines[0][1] != _HEADER:
        raise fail(lines[0][0] if lines else 1, f"expected header {_HEADER!r}")
    if len(lines) < 4:
        raise fail(lines[-1][0], "truncated file: missing meta, sizes, or capacities")

    lineno, meta = lines[1]
    parts = meta.split()
    if len(parts) != 4:
        raise fail(lineno, "expected '<set> <correlation> <variance_regime> <seed>'")
    set_label, correlation, variance_regime, seed_text = parts
    try:
        seed = int(seed_text)
    except ValueError:
        raise fail(lineno, f"seed must be an integer, got {seed_text!r}") from None

    lineno, sizes = lines[2]
    try:
        n_text, m_text = sizes.split()
        n, m = int(n_text), int(m_text)
    except ValueError:
        raise fail(lineno, "expected '<n> <m>'") from None

    lineno, cap_line = lines[3]
    cap_parts = cap_line.split()
    if len(cap_parts) != m:
        raise fail(lineno, f"expected {m} capacities, found {len(cap_parts)}")
    try:
        capacities = tuple(float(c) for c in cap_parts)
    except ValueError:
        raise fail(lineno, "capacities must be decimal numbers") from None

    body = lines[4:]
    if len(body) != n:
        where = body[-1][0] if body else lineno
        raise fail(where, f"declared n={n} but found {len(body)} item rows")
    items = []
    for lineno, row in body:
        parts = row.split()
        if len(parts) != 3:
            raise fail(lineno, "expected '<profit> <mean_weight> <variance>'")
        try:
            profit, mean_weight, variance = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise fail(lineno, f"malformed item row {row!r}") from None
        if not variance > 0:
            raise fail(lineno, f"variance must be positive, got {variance}")
        try:
            items.append(Item(profit=profit, mean_weight=mean_weight, variance=variance))
        except InstanceError as exc:
            raise fail(lineno, str(exc)) from None

    try:
        return Instance(
            items=tuple(items),
            capacities=capacities,
            set_label=set_label,
            correlation=correlation,
            variance_regime=variance_regime,
            seed=seed,
        )
    except InstanceError as exc:
        raise InstanceError(f"{os.fspath(path)}: {exc}") from None


def check_capacity_sum(inst: Instance) -> bool:
    """True when the capacities close to half the total mean weight."""
    total_mu = float(inst.mean_weights.sum())
    return math.isclose(
        sum(inst.capacities), 0.5 * total_mu, rel_tol=1e-12, abs_tol=1e-9
    )
