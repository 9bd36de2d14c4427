"""Replay multilabel datasets as contextual-bandit problems.

Each dataset row is one round: the policy sees the row's features, picks an
arm (a label) and is rewarded with 1 if that label belongs to the row. The
rewards of the other arms are never shown to it.
"""
from __future__ import annotations

import concurrent.futures as cf
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from .datasets import MultilabelDataset, restrict_arms, shuffle_rows
from .errors import DimensionMismatch, LengthMismatch
from .registry import PolicyConfig, make_policy
from .rng import RngStream, derive_stream_id

__all__ = ["SimConfig", "MetricsSeries", "run_round", "run_simulation",
           "average_runs", "run_experiment", "cumulative_mean", "run_policy_on"]


@dataclass(frozen=True)
class SimConfig:
    refit_every: int = 50
    n_runs: int = 10
    seed: int = 0
    arm_subset: Optional[int] = None
    oracle_mode: str = "full"
    l2_lambda: float = 1.0
    shuffle: bool = True
    max_rounds: Optional[int] = None

    def __post_init__(self):
        if self.refit_every < 1:
            raise ValueError("refit_every must be >= 1")
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.oracle_mode not in ("full", "minibatch"):
            raise ValueError("oracle_mode must be 'full' or 'minibatch'")

    def to_dict(self) -> dict:
        return {"refit_every": self.refit_every, "n_runs": self.n_runs, "seed": self.seed,
                "arm_subset": self.arm_subset, "oracle_mode": self.oracle_mode,
                "l2_lambda": self.l2_lambda, "shuffle": self.shuffle,
                "max_rounds": self.max_rounds}


def cumulative_mean(rewards) -> np.ndarray:
    rewards = np.asarray(rewards, dtype=float)
    return np.cumsum(rewards) / np.arange(1, rewards.shape[0] + 1)


@dataclass
class MetricsSeries:
    """Per-round record of one policy on one run (or an average of runs,
    in which case ``rewards`` and ``arms`` are ``None``)."""

    policy: str
    cumulative_mean: np.ndarray
    rewards: Optional[np.ndarray] = None
    arms: Optional[np.ndarray] = None
    run_index: Optional[int] = None
    n_averaged: int = 1

    @property
    def rounds(self) -> int:
        return int(self.cumulative_mean.shape[0])

    @classmethod
    def from_rewards(cls, policy, rewards, arms, run_index=None) -> "MetricsSeries":
        rewards = np.asarray(rewards, dtype=np.int8)
        return cls(policy, cumulative_mean(rewards), rewards,
                   np.asarray(arms, dtype=np.int64), run_index)


def run_round(policy, x, labels) -> tuple:
    """Play one round; returns ``(arm, reward)``."""
    if np.shape(x)[-1] != policy.n_features:
        raise DimensionMismatch("row dimensionality does not match the policy")
    arm = policy.select(x).arm
    reward = int(arm in labels)
    policy.update(x, arm, reward)
    return arm, reward


def run_policy_on(policy, ds: MultilabelDataset, max_rounds=None):
    """Stream every row of ``ds`` through ``policy``; returns (arms, rewards)."""
    n = ds.n_rows if max_rounds is None else min(ds.n_rows, max_rounds)
    arms = np.empty(n, dtype=np.int64)
    rewards = np.empty(n, dtype=np.int8)
    X = ds.features
    for t in range(n):
        x = X[t].toarray().ravel()
        arms[t], rewards[t] = run_round(policy, x, ds.labels[t])
    return arms, rewards


def _prepare(ds: MultilabelDataset, sim: SimConfig, run_index: int) -> MultilabelDataset:
    if sim.arm_subset is not None:
        ds, _ = restrict_arms(ds, sim.arm_subset,
                              RngStream(sim.seed, derive_stream_id("arms", run_index)))
    if sim.shuffle:
        ds = shuffle_rows(ds, RngStream(sim.seed, derive_stream_id("shuffle", run_index)))
    return ds


def _resolve(config: PolicyConfig, ds: MultilabelDataset) -> PolicyConfig:
    if config.name == "most-common" and "arm" not in config.params:
        arm = int(ds.label_counts().argmax())
        return PolicyConfig(config.name, {**config.params, "arm": arm}, config.label,
                            config.coldstart, config.prior_a, config.prior_b, config.prior_m)
    return config


def run_simulation(ds: MultilabelDataset, config: PolicyConfig, sim: SimConfig,
                   run_index: int = 0) -> MetricsSeries:
    """One full pass of one policy over the run's shuffled dataset.

    The shuffle depends only on ``(sim.seed, run_index)``, so every policy of
    the same run sees the rows in the same order; each policy draws its own
    randomness from a stream keyed by its display name.
    """
    data = _prepare(ds, sim, run_index)
    config = _resolve(config, data)
    stream = RngStream(sim.seed, derive_stream_id("policy", config.display_name, run_index))
    policy = make_policy(config, data.n_labels, data.n_features, stream,
                         refit_every=sim.refit_every, l2_lambda=sim.l2_lambda,
                         online=sim.oracle_mode == "minibatch")
    arms, rewards = run_policy_on(policy, data, sim.max_rounds)
    return MetricsSeries.from_rewards(config.display_name, rewards, arms, run_index)


def average_runs(series: Sequence[MetricsSeries]) -> MetricsSeries:
    if not series:
        raise LengthMismatch("nothing to average")
    names = {s.policy for s in series}
    if len(names) != 1:
        raise LengthMismatch(f"cannot average different policies: {sorted(names)}")
    lengths = {s.rounds for s in series}
    if len(lengths) != 1:
        raise LengthMismatch(f"series lengths differ: {sorted(lengths)}")
    mean = np.mean(np.stack([s.cumulative_mean for s in series]), axis=0)
    return MetricsSeries(series[0].policy, mean, n_averaged=len(series))


def run_experiment(ds: MultilabelDataset, configs: Sequence[PolicyConfig], sim: SimConfig,
                   jobs: int = 1) -> Dict[str, List[MetricsSeries]]:
    """Run every (policy, run) pair; results are keyed by display name and
    ordered by run index whatever the degree of parallelism."""
    tasks = [(c, r) for c in configs for r in range(sim.n_runs)]
    if jobs <= 1:
        results = [run_simulation(ds, c, sim, r) for c, r in tasks]
    else:
        with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(run_simulation, ds, c, sim, r) for c, r in tasks]
            results = [f.result() for f in futures]
    out: Dict[str, List[MetricsSeries]] = {}
    for (c, _), res in zip(tasks, results):
        out.setdefault(c.display_name, []).append(res)
    return out
