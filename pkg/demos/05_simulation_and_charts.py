"""
Replay experiments, CSV output and charts
=========================================

The simulator shuffles the rows once per run, shares that order across
policies, averages cumulative mean reward over runs and can write the
curves to an SVG chart. The same pipeline is available from the command
line as ``bandit-forge simulate``.
"""
# %%
import tempfile
from pathlib import Path

from bandit_forge.cli import main
from bandit_forge.datasets import serialize_xc, synthetic_multilabel
from bandit_forge.registry import PolicyConfig
from bandit_forge.simulator import SimConfig, average_runs, run_experiment

data = synthetic_multilabel(1200, 15, 10, seed=5, label_scale=4.0)
configs = [PolicyConfig(n) for n in ("random", "best-arm-mab", "bootstrapped-ucb",
                                     "bootstrapped-ts", "adaptive-greedy")]
results = run_experiment(data, configs, SimConfig(n_runs=3, seed=0))
for name, runs in results.items():
    curve = average_runs(runs).cumulative_mean
    print(f"{name:>18}: round 300 {curve[299]:.3f}  final {curve[-1]:.3f}")

# %%
# The command-line front end writes one CSV per (policy, run), an averaged CSV,
# a manifest that reproduces the run, and optionally an SVG chart.
workdir = Path(tempfile.mkdtemp())
(workdir / "data.txt").write_text(serialize_xc(data))
main(["simulate", "--dataset", str(workdir / "data.txt"), "--policy", "random",
      "--policy", "bootstrapped-ucb", "--runs", "2", "--seed", "7",
      "-o", str(workdir / "out"), "--svg", str(workdir / "curves.svg")])
print(sorted(p.name for p in (workdir / "out").iterdir()))
print((workdir / "out" / "averaged.csv").read_text().splitlines()[1:4])
