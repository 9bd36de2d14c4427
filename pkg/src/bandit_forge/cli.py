"""Command-line front-end: simulations, coverage studies and SVG charts.

Every run is described by a :class:`RunManifest`. The manifest is echoed to
``manifest.json`` next to the outputs, and its configuration is repeated in
the comment line that opens every CSV, so that any file can be regenerated
with ``bandit-forge rerun manifest.json``.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .coverage import DEFAULT_SAMPLE_SIZES, PRESETS, run_coverage
from .datasets import drop_most_common_labels, label_stats, load_xc
from .errors import DatasetFormatError
from .registry import POLICY_NAMES, PolicyConfig
from .resampling import WeightScheme
from .simulator import SimConfig, average_runs, run_experiment
from .svg import line_chart

__all__ = ["RunManifest", "main", "simulate_command", "coverage_command",
           "dataset_info_command", "render_svg", "build_parser"]

EXIT_OK, EXIT_CONFIG, EXIT_DATA = 0, 2, 3
SEED_ENV = "BANDIT_FORGE_SEED"


class ConfigError(Exception):
    """Invalid run configuration; the message names the offending key."""


@dataclass
class RunManifest:
    """Fully serializable description of one CLI run."""

    command: str
    seed: int = 0
    output: Optional[str] = None
    dataset: Optional[str] = None
    one_based: bool = False
    drop_top_labels: int = 0
    policies: List[dict] = field(default_factory=list)
    sim: dict = field(default_factory=dict)
    coverage: dict = field(default_factory=dict)
    jobs: int = 1

    def config_dict(self) -> dict:
        """Everything that determines the outputs (``jobs`` and ``output`` do not)."""
        d = asdict(self)
        d.pop("jobs")
        d.pop("output")
        return d

    def header(self) -> str:
        return (f"# bandit-forge {__version__} {self.command} seed={self.seed} config="
                + json.dumps(self.config_dict(), sort_keys=True, separators=(",", ":")))

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        try:
            data = json.loads(text)
            return cls(**data)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"manifest: {exc}") from None


def _num(v) -> str:
    # repr of a Python float never depends on the locale
    return repr(float(v))


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name)


def _err(msg: str) -> None:
    print(f"bandit-forge: error: {msg}", file=sys.stderr)


# ---------------------------------------------------------------- simulate

def _policy_configs(manifest: RunManifest) -> List[PolicyConfig]:
    if not manifest.policies:
        raise ConfigError("policy: at least one policy is required")
    configs = []
    for i, p in enumerate(manifest.policies):
        try:
            configs.append(PolicyConfig(**p))
        except ValueError as exc:
            raise ConfigError(f"policy: {exc}") from None
        except TypeError as exc:
            raise ConfigError(f"policies[{i}]: {exc}") from None
    labels = [c.display_name for c in configs]
    if len(set(labels)) != len(labels):
        raise ConfigError("policy: duplicate policy labels; give each a distinct label")
    return configs


def _sim_config(manifest: RunManifest) -> SimConfig:
    try:
        return SimConfig(seed=manifest.seed, **manifest.sim)
    except ValueError as exc:
        raise ConfigError(f"sim: {exc}") from None
    except TypeError as exc:
        raise ConfigError(f"sim: {exc}") from None


def _write(path: Path, header: str, columns, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)


def simulate_command(manifest: RunManifest) -> int:
    try:
        configs = _policy_configs(manifest)
        sim = _sim_config(manifest)
        if manifest.dataset is None:
            raise ConfigError("dataset: a dataset path is required")
        if manifest.drop_top_labels < 0:
            raise ConfigError("drop_top_labels: must be >= 0")
        if manifest.jobs < 1:
            raise ConfigError("jobs: must be >= 1")
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    try:
        ds = load_xc(manifest.dataset, one_based=manifest.one_based)
    except (OSError, DatasetFormatError, UnicodeDecodeError) as exc:
        _err(f"dataset {manifest.dataset}: {exc}")
        return EXIT_DATA
    if manifest.drop_top_labels:
        ds, _ = drop_most_common_labels(ds, manifest.drop_top_labels)
    if sim.arm_subset is not None and not 1 <= sim.arm_subset <= ds.n_labels:
        _err(f"sim.arm_subset: {sim.arm_subset} is not in [1, {ds.n_labels}]")
        return EXIT_CONFIG
    try:
        results = run_experiment(ds, configs, sim, jobs=manifest.jobs)
    except ValueError as exc:
        _err(f"policy: {exc}")
        return EXIT_CONFIG

    out = Path(manifest.output or ".")
    out.mkdir(parents=True, exist_ok=True)
    header = manifest.header()
    averaged_rows = []
    for name, runs in results.items():
        for s in runs:
            rows = ((t + 1, _num(c), int(a), int(r))
                    for t, (c, a, r) in enumerate(zip(s.cumulative_mean, s.arms, s.rewards)))
            _write(out / f"{_slug(name)}_run{s.run_index:03d}.csv", header,
                   ["round", "cumulative_mean_reward", "arm", "reward"], rows)
        avg = average_runs(runs)
        averaged_rows.extend((name, t + 1, _num(c)) for t, c in enumerate(avg.cumulative_mean))
    _write(out / "averaged.csv", header, ["policy", "round", "cumulative_mean_reward"],
           averaged_rows)
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    for name, runs in results.items():
        final = np.mean([s.cumulative_mean[-1] for s in runs])
        print(f"{name}: final cumulative mean reward {final:.4f} over {len(runs)} run(s)")
    return EXIT_OK


# ---------------------------------------------------------------- coverage

def coverage_command(manifest: RunManifest) -> int:
    c = dict(manifest.coverage)
    try:
        generator = c.pop("generator", "logistic")
        if generator not in PRESETS:
            raise ConfigError(f"generator: unknown {generator!r}; valid: {', '.join(PRESETS)}")
        try:
            schemes = [WeightScheme(s) for s in c.pop("schemes", [s.value for s in WeightScheme])]
        except ValueError as exc:
            raise ConfigError(f"schemes: {exc}") from None
        if not schemes:
            raise ConfigError("schemes: at least one scheme is required")
        sizes = [int(n) for n in c.pop("sample_sizes", DEFAULT_SAMPLE_SIZES)]
        for key in ("n_samples", "n_resamples", "n_test"):
            if key in c and int(c[key]) < 1:
                raise ConfigError(f"{key}: must be >= 1")
        if sizes and min(sizes) < 2:
            raise ConfigError("sample_sizes: every size must be >= 2")
        pct = float(c.get("pct", 80.0))
        if not 0.0 <= pct <= 100.0:
            raise ConfigError("pct: must lie in [0, 100]")
        if manifest.jobs < 1:
            raise ConfigError("jobs: must be >= 1")
        result = run_coverage(PRESETS[generator], schemes, sizes, seed=manifest.seed,
                              jobs=manifest.jobs, **c)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG
    except (TypeError, ValueError) as exc:
        _err(f"coverage: {exc}")
        return EXIT_CONFIG
    text = result.to_csv(manifest.header()[2:])
    if manifest.output:
        out = Path(manifest.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        out.with_suffix(".manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------- dataset-info

def dataset_info_command(manifest: RunManifest) -> int:
    if manifest.dataset is None:
        _err("dataset: a dataset path is required")
        return EXIT_CONFIG
    try:
        ds = load_xc(manifest.dataset, one_based=manifest.one_based)
    except (OSError, DatasetFormatError, UnicodeDecodeError) as exc:
        _err(f"dataset {manifest.dataset}: {exc}")
        return EXIT_DATA
    if manifest.drop_top_labels:
        ds, _ = drop_most_common_labels(ds, manifest.drop_top_labels)
    for key, value in label_stats(ds).items():
        print(f"{key}: {value:.4f}" if isinstance(value, float) else f"{key}: {value}")
    return EXIT_OK


# ---------------------------------------------------------------- svg

def _read_series(csv_path):
    """Parse an averaged or per-run CSV into ``{policy: (rounds, values)}``."""
    with open(csv_path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#") and ln.strip()]
    if len(lines) < 2:
        raise ValueError("no data rows")
    reader = csv.DictReader(lines)
    fields = reader.fieldnames or []
    if "round" not in fields or "cumulative_mean_reward" not in fields:
        raise ValueError("missing 'round' or 'cumulative_mean_reward' column")
    default = Path(csv_path).stem
    series = {}
    for i, row in enumerate(reader, start=2):
        try:
            name = row.get("policy") or default
            x, y = float(row["round"]), float(row["cumulative_mean_reward"])
        except (TypeError, ValueError):
            raise ValueError(f"row {i}: unparsable values") from None
        if not (np.isfinite(x) and np.isfinite(y)):
            raise ValueError(f"row {i}: non-finite value")
        xs, ys = series.setdefault(name, ([], []))
        xs.append(x)
        ys.append(y)
    return series


def render_svg(csv_path, output_path, title: str = "") -> int:
    try:
        series = _read_series(csv_path)
    except OSError as exc:
        _err(f"{csv_path}: {exc}")
        return EXIT_DATA
    except (ValueError, csv.Error) as exc:
        _err(f"{csv_path}: malformed CSV: {exc}")
        return EXIT_DATA
    Path(output_path).write_text(line_chart(series, title=title), encoding="utf-8")
    return EXIT_OK


# ---------------------------------------------------------------- argument parsing

# flag -> (parameter name, policies accepting it)
_HYPER_FLAGS = {
    "epsilon": ("explore_prob", {"epsilon-greedy"}),
    "active_prob": ("explore_prob", {"active-explorer"}),
    "decay": ("decay", {"epsilon-greedy", "adaptive-greedy", "adaptive-greedy-2",
                        "active-adaptive-greedy"}),
    "resamples": ("n_resamples", {"bootstrapped-ucb", "bootstrapped-ts",
                                  "online-bootstrapped-ucb", "online-bootstrapped-ts"}),
    "weight_scheme": ("weight_scheme", {"bootstrapped-ucb", "bootstrapped-ts",
                                        "online-bootstrapped-ucb", "online-bootstrapped-ts"}),
    "ucb_percentile": ("percentile", {"bootstrapped-ucb", "online-bootstrapped-ucb"}),
    "threshold": ("threshold", {"adaptive-greedy"}),
    "window_size": ("window_size", {"adaptive-greedy-2", "active-adaptive-greedy"}),
    "window_percentile": ("percentile", {"adaptive-greedy-2", "active-adaptive-greedy"}),
    "multiplier": ("multiplier", {"softmax-explorer"}),
    "inflation": ("inflation", {"softmax-explorer"}),
    "breakpoint": ("breakpoint", {"explore-then-exploit"}),
    "arm": ("arm", {"fixed-arm"}),
    "criterion": ("criterion", {"active-explorer", "active-adaptive-greedy"}),
}


def _seed_default() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}: not an integer: {raw!r}") from None


def _csv_list(text: str) -> List[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bandit-forge",
                                description="Contextual bandits replayed on multilabel data.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="replay a dataset with one or more policies")
    s.add_argument("--dataset", required=True, help="XC-format file (optionally .gz)")
    s.add_argument("--one-based", action="store_true", help="indices in the file start at 1")
    s.add_argument("--policy", action="append", required=True,
                   help=f"policy name, repeatable; one of: {', '.join(POLICY_NAMES)}")
    s.add_argument("--output", "-o", default="results", help="output directory")
    s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--refit-every", type=int, default=50)
    s.add_argument("--arm-subset", type=int, default=None)
    s.add_argument("--drop-top-labels", type=int, default=0)
    s.add_argument("--oracle-mode", choices=("full", "minibatch"), default="full")
    s.add_argument("--l2", type=float, default=1.0)
    s.add_argument("--max-rounds", type=int, default=None)
    s.add_argument("--no-shuffle", action="store_true")
    s.add_argument("--coldstart", choices=("mab-first", "smoothing", "none"),
                   default="mab-first")
    s.add_argument("--prior-a", type=float, default=3.0)
    s.add_argument("--prior-b", type=float, default=7.0)
    s.add_argument("--prior-m", type=int, default=2)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--active-prob", type=float)
    s.add_argument("--decay", type=float)
    s.add_argument("--resamples", type=int)
    s.add_argument("--weight-scheme", choices=[w.value for w in WeightScheme])
    s.add_argument("--ucb-percentile", type=float)
    s.add_argument("--threshold", type=float)
    s.add_argument("--window-size", type=int)
    s.add_argument("--window-percentile", type=float)
    s.add_argument("--multiplier", type=float)
    s.add_argument("--inflation", type=float)
    s.add_argument("--breakpoint", type=int)
    s.add_argument("--arm", type=int)
    s.add_argument("--criterion", choices=("weighted", "min", "max"))
    s.add_argument("--svg", help="also render the averaged curves to this SVG file")
    s.add_argument("--jobs", type=int, default=1)

    c = sub.add_parser("coverage", help="coverage study of resampled upper bounds")
    c.add_argument("--generator", default="logistic", help=f"one of: {', '.join(PRESETS)}")
    c.add_argument("--schemes", type=_csv_list, default=[w.value for w in WeightScheme])
    c.add_argument("--sizes", type=_csv_list, default=None, help="comma-separated sample sizes")
    c.add_argument("--n-samples", type=int, default=100)
    c.add_argument("--resamples", type=int, default=10)
    c.add_argument("--percentile", type=float, default=80.0)
    c.add_argument("--n-test", type=int, default=1000)
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--output", "-o", default=None, help="CSV path (default: stdout)")
    c.add_argument("--jobs", type=int, default=1)

    d = sub.add_parser("dataset-info", help="summary statistics of a dataset")
    d.add_argument("--dataset", required=True)
    d.add_argument("--one-based", action="store_true")
    d.add_argument("--drop-top-labels", type=int, default=0)

    r = sub.add_parser("plot", help="render a simulate CSV as an SVG line chart")
    r.add_argument("csv")
    r.add_argument("svg")
    r.add_argument("--title", default="")

    m = sub.add_parser("rerun", help="re-execute a manifest.json")
    m.add_argument("manifest")
    m.add_argument("--output", "-o", default=None, help="override the output location")
    m.add_argument("--jobs", type=int, default=None)
    return p


def _simulate_manifest(args, seed) -> RunManifest:
    policies = []
    for name in args.policy:
        params = {}
        for flag, (param, accepted) in _HYPER_FLAGS.items():
            value = getattr(args, flag)
            if value is not None and name in accepted:
                params[param] = value
        if name in POLICY_NAMES:
            # record every hyperparameter, defaults included
            params = PolicyConfig(name, params).resolved_params()
        policies.append({"name": name, "params": params, "coldstart": args.coldstart,
                         "prior_a": args.prior_a, "prior_b": args.prior_b,
                         "prior_m": args.prior_m})
    sim = {"refit_every": args.refit_every, "n_runs": args.runs,
           "arm_subset": args.arm_subset, "oracle_mode": args.oracle_mode,
           "l2_lambda": args.l2, "shuffle": not args.no_shuffle, "max_rounds": args.max_rounds}
    return RunManifest("simulate", seed=seed, output=args.output, dataset=args.dataset,
                       one_based=args.one_based, drop_top_labels=args.drop_top_labels,
                       policies=policies, sim=sim, jobs=args.jobs)


def _coverage_manifest(args, seed) -> RunManifest:
    try:
        sizes = ([int(v) for v in args.sizes] if args.sizes is not None
                 else list(DEFAULT_SAMPLE_SIZES))
    except ValueError:
        raise ConfigError(f"sizes: not a list of integers: {args.sizes}") from None
    cov = {"generator": args.generator, "schemes": args.schemes, "sample_sizes": sizes,
           "n_samples": args.n_samples, "n_resamples": args.resamples,
           "pct": args.percentile, "n_test": args.n_test}
    return RunManifest("coverage", seed=seed, output=args.output, coverage=cov, jobs=args.jobs)


def run_manifest(manifest: RunManifest) -> int:
    handlers = {"simulate": simulate_command, "coverage": coverage_command,
                "dataset-info": dataset_info_command}
    if manifest.command not in handlers:
        _err(f"command: unknown {manifest.command!r}; valid: {', '.join(handlers)}")
        return EXIT_CONFIG
    return handlers[manifest.command](manifest)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "plot":
            return render_svg(args.csv, args.svg, args.title)
        if args.command == "rerun":
            try:
                text = Path(args.manifest).read_text(encoding="utf-8")
            except OSError as exc:
                raise ConfigError(f"manifest: {exc}") from None
            manifest = RunManifest.from_json(text)
            if args.output is not None:
                manifest.output = args.output
            if args.jobs is not None:
                manifest.jobs = args.jobs
            return run_manifest(manifest)
        if args.command == "dataset-info":
            return dataset_info_command(RunManifest(
                "dataset-info", dataset=args.dataset, one_based=args.one_based,
                drop_top_labels=args.drop_top_labels))
        seed = args.seed if args.seed is not None else _seed_default()
        if args.command == "coverage":
            return coverage_command(_coverage_manifest(args, seed))
        code = simulate_command(_simulate_manifest(args, seed))
        if code == EXIT_OK and args.svg:
            code = render_svg(Path(args.output) / "averaged.csv", args.svg)
        return code
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
