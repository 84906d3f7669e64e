"""Drive the experiment harness end to end from one config file.

Writes a desk-scale dynamic config, runs the full grid, prints the rank
tests, and exports plot-ready tables. Output lands in demo_out/ next to
this file; rerunning reproduces it byte for byte.
"""

import pathlib

from dccmkp.cli import main as cli

CONFIG = """\
seed = 7
budget = 10000
warmup = 1000
runs = 3
population = 50
algorithms = nsga2, moead
alphas = 0.99, 0.999999
baseline = greedy
parallel = 1

[instance]
set = CUSTOM
n = 12
m = 2
correlation = strong
variance = v1
seed = 3

[dynamics]
eta = 0.2
nu = 2, 5
"""


def main():
    here = pathlib.Path(__file__).resolve().parent
    cfg = here / "demo_out" / "experiment.cfg"
    out = here / "demo_out" / "results"
    cfg.parent.mkdir(exist_ok=True)
    cfg.write_text(CONFIG)

    print(f"== run grid -> {out}")
    assert cli(["run", str(cfg), "--out", str(out)]) == 0

    print("== rank tests across algorithms")
    cli(["stats", str(out)])

    print("== plot-ready exports")
    for kind in ("profit_vs_alpha", "error_vs_nu"):
        path = out / f"{kind}.csv"
        cli(["export", str(out), "--kind", kind, "--out", str(path)])
        print(f"  {path}:")
        for line in path.read_text().splitlines()[:4]:
            print(f"    {line}")


if __name__ == "__main__":
    main()
