"""Policy names, default hyperparameters and construction from configs."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .active import ActiveAdaptiveGreedy, ActiveExplorer
from .coldstart import MabFirstConfig, SmoothingConfig
from .policies import (BestArmMAB, BootstrappedTS, BootstrappedUCB,
                       ContextualAdaptiveGreedy, ContextualAdaptiveGreedy2,
                       EpsilonGreedy, ExploreThenExploit, FixedArmPolicy,
                       RandomPolicy, SoftmaxExplorer)

__all__ = ["PolicyConfig", "POLICY_NAMES", "make_policy", "make_coldstart"]

# (class, defaults)
_POLICIES = {
    "random": (RandomPolicy, {}),
    "fixed-arm": (FixedArmPolicy, {"arm": 0}),
    "most-common": (FixedArmPolicy, {}),
    "best-arm-mab": (BestArmMAB, {}),
    "epsilon-greedy": (EpsilonGreedy, {"explore_prob": 0.2, "decay": 0.9999}),
    "explore-then-exploit": (ExploreThenExploit, {"breakpoint": 2000}),
    "softmax-explorer": (SoftmaxExplorer, {"multiplier": 2.0, "inflation": 1.001}),
    "bootstrapped-ucb": (BootstrappedUCB, {"n_resamples": 10, "percentile": 80.0}),
    "bootstrapped-ts": (BootstrappedTS, {"n_resamples": 10}),
    "online-bootstrapped-ucb": (BootstrappedUCB, {"n_resamples": 10, "percentile": 80.0,
                                                  "online": True}),
    "online-bootstrapped-ts": (BootstrappedTS, {"n_resamples": 10, "online": True}),
    "adaptive-greedy": (ContextualAdaptiveGreedy, {"decay": 0.9997}),
    "adaptive-greedy-2": (ContextualAdaptiveGreedy2, {"window_size": 500, "percentile": 30.0,
                                                      "decay": 0.9997}),
    "active-explorer": (ActiveExplorer, {"explore_prob": 0.15}),
    "active-adaptive-greedy": (ActiveAdaptiveGreedy, {"window_size": 500, "percentile": 30.0,
                                                      "decay": 0.9997}),
}

POLICY_NAMES = tuple(_POLICIES)


@dataclass(frozen=True)
class PolicyConfig:
    """A named policy plus hyperparameter overrides.

    ``coldstart`` is ``"mab-first"``, ``"smoothing"`` or ``"none"``; the
    constants come from ``prior_a``, ``prior_b`` and ``prior_m``.
    """

    name: str
    params: dict = field(default_factory=dict)
    label: Optional[str] = None
    coldstart: str = "mab-first"
    prior_a: float = 3.0
    prior_b: float = 7.0
    prior_m: int = 2

    def __post_init__(self):
        if self.name not in _POLICIES:
            raise ValueError(f"unknown policy {self.name!r}; valid names: {', '.join(POLICY_NAMES)}")
        if self.coldstart not in ("mab-first", "smoothing", "none"):
            raise ValueError(f"unknown coldstart {self.coldstart!r}")

    @property
    def display_name(self) -> str:
        return self.label or self.name

    def resolved_params(self) -> dict:
        out = dict(_POLICIES[self.name][1])
        out.update(self.params)
        return out

    def to_dict(self) -> dict:
        return {"name": self.name, "label": self.display_name, "params": self.resolved_params(),
                "coldstart": self.coldstart, "prior_a": self.prior_a,
                "prior_b": self.prior_b, "prior_m": self.prior_m}


def make_coldstart(kind: str, a: float, b: float, m: int):
    if kind == "mab-first":
        return MabFirstConfig(a, b, m)
    if kind == "smoothing":
        return SmoothingConfig(a, b)
    return None


def make_policy(config: PolicyConfig, n_arms: int, n_features: int, rng, **overrides):
    """Instantiate the policy described by ``config``.

    ``overrides`` are shared knobs such as ``refit_every``, ``online`` or
    ``l2_lambda`` coming from the simulation settings; they lose against
    explicit values in ``config.params``.
    """
    cls, _ = _POLICIES[config.name]
    kwargs = dict(overrides)
    kwargs.update(config.resolved_params())
    kwargs["coldstart"] = make_coldstart(config.coldstart, config.prior_a,
                                         config.prior_b, config.prior_m)
    return cls(n_arms, n_features, rng=rng, **kwargs)
