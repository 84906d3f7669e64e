"""Command-line harness: instance generation, experiment batches, statistics.

Subcommands: `gen` writes benchmark instances, `run` executes a config-driven
grid of seeded runs, `stats` aggregates a results directory into rank-test
reports, `export` reshapes results for plotting, `oracle` prints a baseline
line for one instance.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._rng import derive_seed
from .config import (
    BUDGET_PRESETS,
    ConfigError,
    ExperimentConfig,
    InstanceSpec,
    parse_config,
)
from .dynamics import event_to_dict, make_schedule
from .encoding import VariationConfig
from .evaluation import (
    OfflineError,
    ResultRow,
    compare_groups,
    offline_error,
    read_results_csv,
    record_to_dict,
    result_row,
    write_results_csv,
)
from .instance import (
    CORRELATIONS,
    SET_LABELS,
    SET_PAIRS,
    Instance,
    InstanceError,
    generate,
    instance_id,
    read_instance,
    write_instance,
)
from .moea.common import ALGORITHMS, AlgorithmConfig
from .moea.runner import run as run_algorithm
from .oracle import (
    BaselineOptimum,
    branch_and_bound_optimum,
    exhaustive_optimum,
    greedy_baseline,
)
from .stochastic import ConfidenceLevel

MANIFEST_SCHEMA_VERSION = 1


# --- experiment execution ---------------------------------------------------

@dataclass(frozen=True)
class _Job:
    instance: Instance
    algorithm: str
    alpha: float
    eta: float | None
    nu: int | None
    run_index: int
    run_seed: int
    schedule_seed: int
    budget: int
    warmup: int
    population: int
    baseline: str
    baseline_time_limit: float
    count_reevaluations: bool

    def cell_key(self) -> tuple:
        return (
            instance_id(self.instance), self.algorithm, self.alpha,
            self.eta, self.nu,
        )

    def record_name(self) -> str:
        dyn = "static" if self.nu is None else f"eta{self.eta!r}_nu{self.nu}"
        return (
            f"{instance_id(self.instance)}__{self.algorithm}"
            f"__a{self.alpha!r}__{dyn}__r{self.run_index}.json"
        )


def _period_baseline(job: _Job, conf: ConfidenceLevel, capacities) -> BaselineOptimum:
    if job.baseline == "exact":
        return branch_and_bound_optimum(
            job.instance, conf, time_limit=job.baseline_time_limit,
            capacities=capacities,
        )
    return greedy_baseline(job.instance, conf, capacities=capacities)


def _execute_job(job: _Job) -> dict:
    """One seeded run plus its offline-error scoring; returns row + record."""
    conf = ConfidenceLevel(job.alpha)
    n = len(job.instance.items)
    acfg = AlgorithmConfig(
        algorithm=job.algorithm,
        population_size=job.population,
        budget_evaluations=job.budget,
        variation=VariationConfig(mutation_prob=1.0 / n),
        seed=job.run_seed,
        count_change_reevaluations=job.count_reevaluations,
    )
    schedule = None
    if job.nu is not None:
        schedule = make_schedule(
            job.instance.capacities, job.eta, job.nu,
            budget=job.budget, warmup=job.warmup, seed=job.schedule_seed,
        )
    record = run_algorithm(job.instance, conf, acfg, schedule=schedule)

    offline: OfflineError | None = None
    if job.baseline != "none":
        scored = record.snapshots[:-1] if record.num_changes else record.snapshots
        baselines = [
            _period_baseline(job, conf, snap.capacities) for snap in scored
        ]
        offline = offline_error(record, baselines)

    rec = record_to_dict(record)
    if schedule is not None:
        rec["change_log"] = [event_to_dict(ev) for ev in schedule.change_log]
        rec["schedule_seed"] = schedule.seed
    row = result_row(record, offline)
    return {"row": row, "record": rec, "record_name": job.record_name()}


def _load_instance(spec: InstanceSpec) -> Instance:
    if spec.file is not None:
        return read_instance(spec.file)
    return generate(
        spec.set_label, spec.n, spec.m, spec.correlation,
        spec.variance_regime, spec.seed,
    )


def _build_jobs(cfg: ExperimentConfig, instances: list[Instance]) -> list[_Job]:
    dynamics_cells: list[tuple[float | None, int | None]]
    if cfg.dynamics is None:
        dynamics_cells = [(None, None)]
    else:
        dynamics_cells = [(cfg.dynamics.eta, nu) for nu in cfg.dynamics.nus]
    jobs: list[_Job] = []
    for inst in instances:
        iid = instance_id(inst)
        for algorithm in cfg.algorithms:
            for alpha in cfg.alphas:
                for eta, nu in dynamics_cells:
                    for r in range(cfg.runs):
                        run_seed = derive_seed(
                            cfg.seed, "run", iid, algorithm, repr(alpha),
                            "static" if eta is None else repr(eta),
                            0 if nu is None else nu, r,
                        )
                        sched_seed = derive_seed(
                            cfg.seed, "schedule", iid,
                            "static" if eta is None else repr(eta),
                            0 if nu is None else nu, r,
                        )
                        jobs.append(_Job(
                            instance=inst,
                            algorithm=algorithm,
                            alpha=alpha,
                            eta=eta,
                            nu=nu,
                            run_index=r,
                            run_seed=run_seed,
                            schedule_seed=sched_seed,
                            budget=cfg.budget,
                            warmup=cfg.warmup,
                            population=cfg.population,
                            baseline=cfg.baseline,
                            baseline_time_limit=cfg.baseline_time_limit,
                            count_reevaluations=cfg.count_reevaluations,
                        ))
    return jobs


def execute_experiment(cfg: ExperimentConfig, config_path: str,
                       config_text: str, out_dir: str) -> int:
    started = time.time()
    os.makedirs(out_dir, exist_ok=True)
    records_dir = os.path.join(out_dir, "records")
    instances_dir = os.path.join(out_dir, "instances")
    os.makedirs(records_dir, exist_ok=True)
    os.makedirs(instances_dir, exist_ok=True)

    instances = []
    for spec in cfg.instances:
        inst = _load_instance(spec)
        write_instance(inst, os.path.join(instances_dir, instance_id(inst) + ".txt"))
        instances.append(inst)

    jobs = _build_jobs(cfg, instances)
    workers = cfg.parallel if cfg.parallel is not None else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(jobs)))

    results: list[dict | None] = [None] * len(jobs)
    failures: list[dict] = []
    if workers == 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = _execute_job(job)
            except Exception as exc:  # noqa: BLE001 - cell isolation
                failures.append({"job": job.record_name(), "error": str(exc)})
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_execute_job, job): i for i, job in enumerate(jobs)}
            for fut in concurrent.futures.as_completed(futures):
                i = futures[fut]
                try:
                    results[i] = fut.result()
                except Exception as exc:  # noqa: BLE001 - cell isolation
                    failures.append({"job": jobs[i].record_name(), "error": str(exc)})

    rows: list[ResultRow] = []
    for res in results:
        if res is None:
            continue
        rows.append(res["row"])
        rec_path = os.path.join(records_dir, res["record_name"])
        with open(rec_path + ".tmp", "w") as fh:
            json.dump(res["record"], fh, indent=1, sort_keys=True)
            fh.write("\n")
        os.replace(rec_path + ".tmp", rec_path)

    write_results_csv(rows, os.path.join(out_dir, "results.csv"))
    stats = _stats_payload(rows)
    _write_json(stats, os.path.join(out_dir, "stats.json"))

    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "package_version": __version__,
        "config_path": os.path.abspath(config_path),
        "config_sha256": hashlib.sha256(config_text.encode()).hexdigest(),
        "config_text": config_text,
        "grid": {
            "instances": [instance_id(inst) for inst in instances],
            "algorithms": list(cfg.algorithms),
            "alphas": list(cfg.alphas),
            "dynamics": None if cfg.dynamics is None else {
                "eta": cfg.dynamics.eta, "nu": list(cfg.dynamics.nus),
            },
            "runs": cfg.runs,
            "budget": cfg.budget,
            "warmup": cfg.warmup,
            "jobs": len(jobs),
        },
        "failures": sorted(failures, key=lambda f: f["job"]),
        "started_at": started,
        "wall_seconds": time.time() - started,
    }
    _write_json(manifest, os.path.join(out_dir, "manifest.json"))

    for failure in failures:
        print(f"cell failed: {failure['job']}: {failure['error']}", file=sys.stderr)
    return 1 if failures else 0


def _write_json(payload: dict, path: str) -> None:
    with open(path + ".tmp", "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(path + ".tmp", path)


# --- aggregation ------------------------------------------------------------

def _cell_of(row: ResultRow) -> tuple:
    return (row.instance, row.alpha, row.variance_regime, row.eta, row.nu)


def _stats_payload(rows: list[ResultRow]) -> dict:
    """Rank-test families per cell, one over profits and one over errors."""
    cells: dict[tuple, dict[str, list[ResultRow]]] = {}
    for row in rows:
        cells.setdefault(_cell_of(row), {}).setdefault(row.algorithm, []).append(row)

    def family(metric: str) -> list[dict]:
        out = []
        for key in sorted(cells, key=lambda k: tuple(map(_sortable, k))):
            by_alg = cells[key]
            if len(by_alg) < 2:
                continue
            groups = {}
            for alg in sorted(by_alg):
                vals = [
                    r.best_profit if metric == "best_profit" else r.mean_epsilon
                    for r in by_alg[alg]
                ]
                if any(v is None for v in vals):
                    groups = {}
                    break
                groups[alg] = [float(v) for v in vals]
            if not groups:
                continue
            report = compare_groups(groups)
            instance, alpha, variance, eta, nu = key
            out.append({
                "instance": instance,
                "alpha": alpha,
                "variance_regime": variance,
                "eta": eta,
                "nu": nu,
                "labels": list(report.labels),
                "h_statistic": report.h_statistic,
                "significant": report.significant,
                "markers": [list(r) for r in report.markers],
                "marker_lines": {
                    label: report.marker_line(label) for label in report.labels
                },
            })
        return out

    return {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "metrics": {
            "best_profit": family("best_profit"),
            "mean_epsilon": family("mean_epsilon"),
        },
    }


def _sortable(v) -> tuple:
    if v is None:
        return (0, "", 0.0)
    if isinstance(v, str):
        return (1, v, 0.0)
    return (2, "", float(v))


def _export_rows(rows: list[ResultRow], kind: str) -> list[str]:
    if kind == "profit_vs_alpha":
        header = "instance,algorithm,variance_regime,alpha,count,mean,std"
        keyer = lambda r: (r.instance, r.algorithm, r.variance_regime, r.alpha)
        value = lambda r: float(r.best_profit)
        usable = rows
    else:
        header = "instance,algorithm,variance_regime,nu,count,mean,std"
        keyer = lambda r: (r.instance, r.algorithm, r.variance_regime, r.nu)
        value = lambda r: r.mean_epsilon
        usable = [r for r in rows if r.nu is not None and r.mean_epsilon is not None]

    cells: dict[tuple, list[float]] = {}
    for row in usable:
        cells.setdefault(keyer(row), []).append(value(row))
    lines = [header]
    for key in sorted(cells):
        vals = np.array(cells[key], dtype=np.float64)
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        lines.append(
            ",".join(
                [str(k) for k in key]
                + [str(len(vals)), repr(float(vals.mean())), repr(std)]
            )
        )
    return lines


# --- subcommands ------------------------------------------------------------

def _cmd_gen(args: argparse.Namespace) -> int:
    set_label = args.set.upper()
    n, m = args.n, args.m
    if (n is None or m is None) and set_label in SET_PAIRS:
        pairs = SET_PAIRS[set_label]
        if len(pairs) == 1:
            n = n if n is not None else pairs[0][0]
            m = m if m is not None else pairs[0][1]
    if n is None or m is None:
        print(f"gen: set {set_label} needs explicit --n and --m", file=sys.stderr)
        return 2
    try:
        inst = generate(set_label, n, m, args.correlation.upper(),
                        args.variance.upper(), args.seed)
    except (InstanceError, ValueError) as exc:
        print(f"gen: {exc}", file=sys.stderr)
        return 2
    out = args.out
    if os.path.isdir(out):
        out = os.path.join(out, instance_id(inst) + ".txt")
    write_instance(inst, out)
    print(out)
    return 0


def _resolve_budget(value: str) -> tuple[int, int | None]:
    if value.lower() in BUDGET_PRESETS:
        return BUDGET_PRESETS[value.lower()]
    return int(value), None


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"run: cannot read config: {exc}", file=sys.stderr)
        return 2

    replacements = {}
    if args.seed is not None:
        replacements["seed"] = args.seed
    if args.budget is not None:
        try:
            budget, warmup = _resolve_budget(args.budget)
        except ValueError:
            print(f"run: invalid --budget {args.budget!r}", file=sys.stderr)
            return 2
        replacements["budget"] = budget
        if warmup is not None:
            replacements["warmup"] = warmup
    if args.runs is not None:
        replacements["runs"] = args.runs
    if args.parallel is not None:
        replacements["parallel"] = args.parallel
    if replacements:
        import dataclasses

        cfg = dataclasses.replace(cfg, **replacements)
    if cfg.warmup >= cfg.budget:
        print("run: warmup must be smaller than budget", file=sys.stderr)
        return 2

    out_dir = args.out or cfg.out
    if out_dir is None:
        print("run: no output directory (config `out` or --out)", file=sys.stderr)
        return 2
    with open(args.config) as fh:
        config_text = fh.read()
    return execute_experiment(cfg, args.config, config_text, out_dir)


def _cmd_stats(args: argparse.Namespace) -> int:
    csv_path = os.path.join(args.results_dir, "results.csv")
    try:
        rows = read_results_csv(csv_path)
    except (OSError, ValueError) as exc:
        print(f"stats: {exc}", file=sys.stderr)
        return 2
    payload = _stats_payload(rows)
    out_path = os.path.join(args.results_dir, "stats.json")
    _write_json(payload, out_path)
    for metric, families in payload["metrics"].items():
        for fam in families:
            cell = (
                f"{fam['instance']} alpha={fam['alpha']!r} "
                f"{fam['variance_regime']}"
            )
            if fam["nu"] is not None:
                cell += f" eta={fam['eta']!r} nu={fam['nu']}"
            print(f"{metric} | {cell} | H={fam['h_statistic']:.4f} "
                  f"significant={fam['significant']}")
            for label in fam["labels"]:
                print(f"  {label}: {fam['marker_lines'][label]}")
    print(out_path)
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    csv_path = os.path.join(args.results_dir, "results.csv")
    try:
        rows = read_results_csv(csv_path)
    except (OSError, ValueError) as exc:
        print(f"export: {exc}", file=sys.stderr)
        return 2
    if not rows:
        print("export: no result rows found", file=sys.stderr)
    lines = _export_rows(rows, args.kind)
    out = args.out or os.path.join(args.results_dir, f"{args.kind}.csv")
    with open(out + ".tmp", "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(out + ".tmp", out)
    print(out)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    try:
        inst = read_instance(args.instance)
    except (OSError, InstanceError) as exc:
        print(f"oracle: {exc}", file=sys.stderr)
        return 2
    conf = ConfidenceLevel(args.alpha)
    if args.exact:
        if args.exhaustive:
            base = exhaustive_optimum(inst, conf)
        else:
            base = branch_and_bound_optimum(inst, conf, time_limit=args.time_limit)
    else:
        base = greedy_baseline(inst, conf)
    print(f"{base.instance_id} {base.profit} {base.method} {base.gap!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dccmkp",
        description="Chance-constrained dynamic multiple-knapsack benchmark harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a benchmark instance file")
    gen.add_argument("--set", default="FK1", help=f"instance family {SET_LABELS}")
    gen.add_argument("--n", type=int, default=None, help="item count")
    gen.add_argument("--m", type=int, default=None, help="knapsack count")
    gen.add_argument("--correlation", default="STRONG", help=str(CORRELATIONS))
    gen.add_argument("--variance", default="V1", help="V1 or V2")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=".", help="output file or directory")
    gen.set_defaults(func=_cmd_gen)

    runp = sub.add_parser("run", help="execute an experiment config")
    runp.add_argument("config", help="experiment config file")
    runp.add_argument("--seed", type=int, default=None, help="master seed override")
    runp.add_argument("--budget", default=None,
                      help="evaluations, or preset `desk` (1e5) / `paper` (1e7)")
    runp.add_argument("--runs", type=int, default=None, help="runs per cell override")
    runp.add_argument("--parallel", type=int, default=None,
                      help="worker processes (default: config or all cores)")
    runp.add_argument("--out", default=None, help="output directory override")
    runp.set_defaults(func=_cmd_run)

    stats = sub.add_parser("stats", help="rank tests over a results directory")
    stats.add_argument("results_dir")
    stats.set_defaults(func=_cmd_stats)

    export = sub.add_parser("export", help="plot-ready aggregation of results")
    export.add_argument("results_dir")
    export.add_argument("--kind", required=True,
                        choices=("profit_vs_alpha", "error_vs_nu"))
    export.add_argument("--out", default=None, help="output CSV path")
    export.set_defaults(func=_cmd_export)

    oracle = sub.add_parser("oracle", help="print a baseline line for an instance")
    oracle.add_argument("instance", help="instance file")
    group = oracle.add_mutually_exclusive_group()
    group.add_argument("--exact", action="store_true",
                       help="branch-and-bound optimum")
    group.add_argument("--greedy", action="store_true",
                       help="density greedy lower bound (default)")
    oracle.add_argument("--exhaustive", action="store_true",
                        help="with --exact, enumerate instead of branch and bound")
    oracle.add_argument("--alpha", type=float, default=0.99)
    oracle.add_argument("--time-limit", type=float, default=None,
                        help="seconds before branch and bound degrades to a bound")
    oracle.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
