"""Declarative experiment configuration.

One text file describes the whole grid: top-level `key = value` lines plus
repeated `[instance]` sections and an optional `[dynamics]` section. Every
diagnostic carries the offending line number so a bad config fails fast and
points at itself.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

from .instance import (
    CORRELATIONS,
    SET_LABELS,
    SET_PAIRS,
    VARIANCE_REGIMES,
)
from .moea.common import ALGORITHMS

DEFAULT_ALPHAS = (1 - 1e-2, 1 - 1e-4, 1 - 1e-6, 1 - 1e-8)
BUDGET_PRESETS = {"desk": (100_000, 10_000), "paper": (10_000_000, 1_000_000)}
BASELINE_MODES = ("none", "greedy", "exact")


class ConfigError(ValueError):
    """Invalid configuration; message is `path:line: problem`."""


@dataclass(frozen=True)
class InstanceSpec:
    """Either generation parameters or a path to an existing instance file."""

    file: str | None = None
    set_label: str = "FK1"
    n: int | None = None
    m: int | None = None
    correlation: str = "STRONG"
    variance_regime: str = "V1"
    seed: int = 0


@dataclass(frozen=True)
class DynamicsSpec:
    eta: float
    nus: tuple[int, ...]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    budget: int
    warmup: int
    runs: int
    population: int
    algorithms: tuple[str, ...]
    alphas: tuple[float, ...]
    baseline: str
    out: str | None
    parallel: int | None
    count_reevaluations: bool
    baseline_time_limit: float
    instances: tuple[InstanceSpec, ...]
    dynamics: DynamicsSpec | None


@dataclass
class _Line:
    lineno: int
    key: str
    value: str


def _split_lines(path: str, text: str) -> tuple[list[_Line], dict[str, list[list[_Line]]]]:
    """Top-level lines and per-section-name lists of key-value blocks."""
    top: list[_Line] = []
    sections: dict[str, list[list[_Line]]] = {}
    current: list[_Line] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"{path}:{lineno}: unterminated section header")
            name = line[1:-1].strip().lower()
            if name not in ("instance", "dynamics"):
                raise ConfigError(f"{path}:{lineno}: unknown section [{name}]")
            current = []
            sections.setdefault(name, []).append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected `key = value`")
        key, value = line.split("=", 1)
        entry = _Line(lineno, key.strip().lower(), value.strip())
        if current is None:
            top.append(entry)
        else:
            current.append(entry)
    return top, sections


def _to_int(path: str, ln: _Line) -> int:
    try:
        return int(ln.value)
    except ValueError:
        raise ConfigError(
            f"{path}:{ln.lineno}: {ln.key} must be an integer, got {ln.value!r}"
        ) from None


def _to_float(path: str, ln: _Line) -> float:
    try:
        return float(ln.value)
    except ValueError:
        raise ConfigError(
            f"{path}:{ln.lineno}: {ln.key} must be a number, got {ln.value!r}"
        ) from None


def _to_bool(path: str, ln: _Line) -> bool:
    low = ln.value.lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ConfigError(f"{path}:{ln.lineno}: {ln.key} must be true or false")


def _csv_list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _parse_instance(path: str, block: list[_Line], header_line: int) -> InstanceSpec:
    fields = {ln.key: ln for ln in block}
    unknown = set(fields) - {"file", "set", "n", "m", "correlation", "variance", "seed"}
    if unknown:
        ln = fields[sorted(unknown)[0]]
        raise ConfigError(f"{path}:{ln.lineno}: unknown instance field {ln.key!r}")
    if "file" in fields:
        extra = set(fields) - {"file"}
        if extra:
            ln = fields[sorted(extra)[0]]
            raise ConfigError(
                f"{path}:{ln.lineno}: file-based instances take no other fields"
            )
        return InstanceSpec(file=fields["file"].value)

    set_label = fields["set"].value.upper() if "set" in fields else "FK1"
    if set_label not in SET_LABELS:
        ln = fields["set"]
        raise ConfigError(
            f"{path}:{ln.lineno}: unknown set {ln.value!r}; choose from {SET_LABELS}"
        )
    n = _to_int(path, fields["n"]) if "n" in fields else None
    m = _to_int(path, fields["m"]) if "m" in fields else None
    if (n is None or m is None) and set_label in SET_PAIRS:
        pairs = SET_PAIRS[set_label]
        if len(pairs) == 1:
            n = n if n is not None else pairs[0][0]
            m = m if m is not None else pairs[0][1]
    if n is None or m is None:
        raise ConfigError(
            f"{path}:{header_line}: instance needs explicit n and m "
            f"(set {set_label} does not pin a unique size)"
        )
    correlation = (
        fields["correlation"].value.upper() if "correlation" in fields else "STRONG"
    )
    if correlation not in CORRELATIONS:
        ln = fields["correlation"]
        raise ConfigError(
            f"{path}:{ln.lineno}: unknown correlation {ln.value!r}; "
            f"choose from {CORRELATIONS}"
        )
    variance = fields["variance"].value.upper() if "variance" in fields else "V1"
    if variance not in VARIANCE_REGIMES or variance == "CUSTOM":
        ln = fields["variance"]
        raise ConfigError(
            f"{path}:{ln.lineno}: unknown variance regime {ln.value!r}; "
            "choose V1 or V2"
        )
    seed = _to_int(path, fields["seed"]) if "seed" in fields else 0
    return InstanceSpec(
        set_label=set_label, n=n, m=m, correlation=correlation,
        variance_regime=variance, seed=seed,
    )


def parse_config(path: str | os.PathLike) -> ExperimentConfig:
    path = os.fspath(path)
    with open(path) as fh:
        text = fh.read()
    return parse_config_text(path, text)


def parse_config_text(path: str, text: str) -> ExperimentConfig:
    top, sections = _split_lines(path, text)
    known = {
        "seed", "budget", "warmup", "runs", "population", "algorithms",
        "alphas", "baseline", "out", "parallel", "count_reevaluations",
        "baseline_time_limit",
    }
    values: dict[str, _Line] = {}
    for ln in top:
        if ln.key not in known:
            raise ConfigError(f"{path}:{ln.lineno}: unknown key {ln.key!r}")
        if ln.key in values:
            raise ConfigError(f"{path}:{ln.lineno}: duplicate key {ln.key!r}")
        values[ln.key] = ln

    seed = _to_int(path, values["seed"]) if "seed" in values else 0
    if seed < 0:
        raise ConfigError(f"{path}:{values['seed'].lineno}: seed must be >= 0")

    if "budget" not in values:
        raise ConfigError(f"{path}:1: missing required key `budget`")
    budget_ln = values["budget"]
    warmup_default: int | None = None
    if budget_ln.value.lower() in BUDGET_PRESETS:
        budget, warmup_default = BUDGET_PRESETS[budget_ln.value.lower()]
    else:
        budget = _to_int(path, budget_ln)
    if budget < 1:
        raise ConfigError(f"{path}:{budget_ln.lineno}: budget must be positive")

    if "warmup" in values:
        warmup = _to_int(path, values["warmup"])
    elif warmup_default is not None:
        warmup = warmup_default
    else:
        warmup = budget // 10
    if not 0 <= warmup < budget:
        raise ConfigError(
            f"{path}:{values.get('warmup', budget_ln).lineno}: "
            f"warmup must be in [0, budget)"
        )

    runs = _to_int(path, values["runs"]) if "runs" in values else 30
    if runs < 1:
        raise ConfigError(f"{path}:{values['runs'].lineno}: runs must be >= 1")
    population = _to_int(path, values["population"]) if "population" in values else 100
    if population < 2:
        raise ConfigError(
            f"{path}:{values['population'].lineno}: population must be >= 2"
        )

    if "algorithms" in values:
        ln = values["algorithms"]
        algorithms = tuple(a.upper() for a in _csv_list(ln.value))
        if not algorithms:
            raise ConfigError(f"{path}:{ln.lineno}: algorithms list is empty")
        for a in algorithms:
            if a not in ALGORITHMS:
                raise ConfigError(
                    f"{path}:{ln.lineno}: unknown algorithm {a!r}; "
                    f"choose from {ALGORITHMS}"
                )
    else:
        algorithms = ALGORITHMS

    if "alphas" in values:
        ln = values["alphas"]
        try:
            alphas = tuple(float(v) for v in _csv_list(ln.value))
        except ValueError:
            raise ConfigError(f"{path}:{ln.lineno}: alphas must be numbers") from None
        if not alphas:
            raise ConfigError(f"{path}:{ln.lineno}: alphas list is empty")
        for a in alphas:
            if not 0.5 < a < 1.0:
                raise ConfigError(
                    f"{path}:{ln.lineno}: alpha {a!r} outside (0.5, 1)"
                )
    else:
        alphas = DEFAULT_ALPHAS

    baseline = values["baseline"].value.lower() if "baseline" in values else "greedy"
    if baseline not in BASELINE_MODES:
        raise ConfigError(
            f"{path}:{values['baseline'].lineno}: baseline must be one of "
            f"{BASELINE_MODES}"
        )

    out = values["out"].value if "out" in values else None
    parallel = _to_int(path, values["parallel"]) if "parallel" in values else None
    if parallel is not None and parallel < 1:
        raise ConfigError(f"{path}:{values['parallel'].lineno}: parallel must be >= 1")
    count_reevals = (
        _to_bool(path, values["count_reevaluations"])
        if "count_reevaluations" in values
        else True
    )
    time_limit = (
        _to_float(path, values["baseline_time_limit"])
        if "baseline_time_limit" in values
        else 10.0
    )
    if time_limit <= 0:
        raise ConfigError(
            f"{path}:{values['baseline_time_limit'].lineno}: "
            "baseline_time_limit must be positive"
        )

    if "instance" not in sections or not sections["instance"]:
        raise ConfigError(f"{path}:1: at least one [instance] section is required")
    instances = []
    for block in sections["instance"]:
        header_line = block[0].lineno if block else 1
        instances.append(_parse_instance(path, block, header_line))

    dynamics = None
    if "dynamics" in sections:
        if len(sections["dynamics"]) > 1:
            extra = sections["dynamics"][1]
            lineno = extra[0].lineno if extra else 1
            raise ConfigError(f"{path}:{lineno}: only one [dynamics] section allowed")
        block = {ln.key: ln for ln in sections["dynamics"][0]}
        unknown = set(block) - {"eta", "nu"}
        if unknown:
            ln = block[sorted(unknown)[0]]
            raise ConfigError(f"{path}:{ln.lineno}: unknown dynamics field {ln.key!r}")
        if "eta" not in block or "nu" not in block:
            lineno = next(iter(block.values())).lineno if block else 1
            raise ConfigError(f"{path}:{lineno}: dynamics needs `eta` and `nu`")
        eta = _to_float(path, block["eta"])
        if not 0.0 < eta < 1.0:
            raise ConfigError(
                f"{path}:{block['eta'].lineno}: eta must be in (0, 1)"
            )
        try:
            nus = tuple(int(v) for v in _csv_list(block["nu"].value))
        except ValueError:
            raise ConfigError(
                f"{path}:{block['nu'].lineno}: nu must be integers"
            ) from None
        if not nus or any(v < 1 for v in nus):
            raise ConfigError(
                f"{path}:{block['nu'].lineno}: nu values must be >= 1"
            )
        dynamics = DynamicsSpec(eta=eta, nus=nus)

    return ExperimentConfig(
        seed=seed,
        budget=budget,
        warmup=warmup,
        runs=runs,
        population=population,
        algorithms=algorithms,
        alphas=alphas,
        baseline=baseline,
        out=out,
        parallel=parallel,
        count_reevaluations=count_reevals,
        baseline_time_limit=time_limit,
        instances=tuple(instances),
        dynamics=dynamics,
    )
