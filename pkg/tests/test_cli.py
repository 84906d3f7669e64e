import json
import os

import pytest

from dccmkp.cli import main
from dccmkp.evaluation import read_results_csv
from dccmkp.instance import read_instance

SMALL_CFG = """\
seed = 5
budget = 4000
warmup = 400
runs = 2
population = 20
algorithms = nsga2, moead
alphas = 0.99
baseline = exact
baseline_time_limit = 5.0
parallel = 1

[instance]
set = CUSTOM
n = 8
m = 2
correlation = strong
variance = v1
seed = 3

[dynamics]
eta = 0.2
nu = 3
"""


@pytest.fixture()
def exp_dir(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(SMALL_CFG)
    out = tmp_path / "out"
    return cfg, out


def test_gen_writes_readable_instance(tmp_path, capsys):
    rc = main(["gen", "--set", "CUSTOM", "--n", "6", "--m", "2",
               "--variance", "V1", "--seed", "4", "--out", str(tmp_path)])
    assert rc == 0
    path = capsys.readouterr().out.strip()
    assert os.path.dirname(path) == str(tmp_path)
    inst = read_instance(path)
    assert (inst.n, inst.m, inst.seed) == (6, 2, 4)


def test_gen_rejects_unsized_custom(capsys):
    rc = main(["gen", "--set", "CUSTOM", "--out", "."])
    assert rc == 2
    assert "--n" in capsys.readouterr().err


def test_gen_default_set_has_published_size(tmp_path, capsys):
    rc = main(["gen", "--out", str(tmp_path)])
    assert rc == 0
    inst = read_instance(capsys.readouterr().out.strip())
    assert (inst.n, inst.m) == (100, 10)


def test_run_produces_records_results_stats_manifest(exp_dir, capsys):
    cfg, out = exp_dir
    rc = main(["run", str(cfg), "--out", str(out)])
    assert rc == 0
    rows = read_results_csv(str(out / "results.csv"))
    # 1 instance x 2 algorithms x 1 alpha x 1 nu x 2 runs
    assert len(rows) == 4
    assert {r.algorithm for r in rows} == {"NSGA2", "MOEAD"}
    assert {r.nu for r in rows} == {3}
    records = list((out / "records").glob("*.json"))
    assert len(records) == 4
    sample = json.loads(records[0].read_text())
    assert sample["schema_version"] == 1
    assert sample["num_changes"] == 3
    assert len(sample["snapshots"]) == 4
    assert (out / "stats.json").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_sha256"]
    assert (out / "instances").is_dir()
    assert all(r.best_profit > 0 for r in rows)
    assert all(r.mean_epsilon is not None for r in rows)


def test_run_static_config(tmp_path, capsys):
    cfg = tmp_path / "static.cfg"
    cfg.write_text(
        "seed = 5\nbudget = 2000\nruns = 2\npopulation = 20\n"
        "algorithms = nsga2\nalphas = 0.99\nbaseline = exact\nparallel = 1\n"
        "[instance]\nset = CUSTOM\nn = 8\nm = 2\nseed = 3\n"
    )
    out = tmp_path / "out"
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    rows = read_results_csv(str(out / "results.csv"))
    assert len(rows) == 2
    assert {r.nu for r in rows} == {None}
    assert {r.eta for r in rows} == {None}
    # static runs score offline error on the single terminal snapshot
    assert all(r.mean_epsilon is not None and r.mean_epsilon >= 0 for r in rows)


def test_run_is_deterministic_byte_for_byte(exp_dir, capsys):
    cfg, out = exp_dir
    a = out.parent / "out-a"
    b = out.parent / "out-b"
    assert main(["run", str(cfg), "--out", str(a)]) == 0
    assert main(["run", str(cfg), "--out", str(b)]) == 0
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
    assert (a / "stats.json").read_bytes() == (b / "stats.json").read_bytes()


def test_run_bad_config_exits_2_with_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("budget = 100\nalgorithms = GA\n[instance]\nset = FK1\n")
    rc = main(["run", str(cfg), "--out", str(tmp_path / "o")])
    assert rc == 2
    err = capsys.readouterr().err
    assert f"{cfg}:2" in err
    assert "GA" in err


def test_run_missing_config_exits_2(tmp_path, capsys):
    rc = main(["run", str(tmp_path / "ghost.cfg"), "--out", str(tmp_path)])
    assert rc == 2
    assert "config" in capsys.readouterr().err


def test_run_requires_output_directory(tmp_path, capsys):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("budget = 100\n[instance]\nset = FK1\n")
    rc = main(["run", str(cfg)])
    assert rc == 2
    assert "out" in capsys.readouterr().err


def test_stats_and_export_over_results(exp_dir, capsys):
    cfg, out = exp_dir
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    capsys.readouterr()

    assert main(["stats", str(out)]) == 0
    stats_out = capsys.readouterr().out
    assert "H=" in stats_out
    payload = json.loads((out / "stats.json").read_text())
    assert set(payload["metrics"]) == {"best_profit", "mean_epsilon"}

    assert main(["export", str(out), "--kind", "profit_vs_alpha"]) == 0
    path = capsys.readouterr().out.strip()
    lines = open(path).read().splitlines()
    assert lines[0].startswith("instance,")
    assert len(lines) > 1

    assert main(["export", str(out), "--kind", "error_vs_nu"]) == 0
    path = capsys.readouterr().out.strip()
    assert open(path).read().count("\n") >= 2


def test_stats_without_results_exits_2(tmp_path, capsys):
    assert main(["stats", str(tmp_path)]) == 2
    assert "stats:" in capsys.readouterr().err


def test_oracle_emits_baseline_line(tmp_path, capsys):
    assert main(["gen", "--set", "CUSTOM", "--n", "6", "--m", "2",
                 "--seed", "4", "--out", str(tmp_path)]) == 0
    inst_path = capsys.readouterr().out.strip()

    assert main(["oracle", inst_path, "--exact", "--alpha", "0.99"]) == 0
    fields = capsys.readouterr().out.split()
    assert fields[2] == "EXACT_BB"
    assert float(fields[3]) == 0.0
    exact_profit = int(fields[1])

    assert main(["oracle", inst_path, "--exact", "--exhaustive"]) == 0
    assert int(capsys.readouterr().out.split()[1]) == exact_profit

    assert main(["oracle", inst_path]) == 0
    fields = capsys.readouterr().out.split()
    assert fields[2] == "GREEDY_LB"
    assert int(fields[1]) <= exact_profit


def test_oracle_missing_file_exits_2(tmp_path, capsys):
    assert main(["oracle", str(tmp_path / "none.txt")]) == 2
    assert "oracle:" in capsys.readouterr().err
