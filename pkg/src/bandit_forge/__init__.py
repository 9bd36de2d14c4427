"""Contextual bandits built on per-arm logistic oracles, replayed on
multilabel classification data, plus a coverage study of resampled upper
confidence bounds."""

__version__ = "0.1.0"

from .active import ActiveAdaptiveGreedy, ActiveCriterion, ActiveExplorer, active_score
from .coldstart import MabFirstConfig, SmoothingConfig, smooth
from .coverage import GeneratorSpec, run_coverage
from .datasets import MultilabelDataset, load_xc, parse_xc, serialize_xc
from .oracle import ArmHistory, OracleModel, fit_full, partial_fit, predict_proba
from .policies import (BestArmMAB, BootstrappedTS, BootstrappedUCB,
                       ContextualAdaptiveGreedy, ContextualAdaptiveGreedy2,
                       EpsilonGreedy, ExploreThenExploit, FixedArmPolicy, Policy,
                       RandomPolicy, SoftmaxExplorer, percentile)
from .registry import POLICY_NAMES, PolicyConfig, make_policy
from .resampling import WeightScheme
from .rng import RngStream
from .simulator import SimConfig, run_experiment, run_simulation

__all__ = [
    "ActiveAdaptiveGreedy", "ActiveCriterion", "ActiveExplorer", "active_score",
    "MabFirstConfig", "SmoothingConfig", "smooth", "GeneratorSpec", "run_coverage",
    "MultilabelDataset", "load_xc", "parse_xc", "serialize_xc",
    "ArmHistory", "OracleModel", "fit_full", "partial_fit", "predict_proba",
    "BestArmMAB", "BootstrappedTS", "BootstrappedUCB", "ContextualAdaptiveGreedy",
    "ContextualAdaptiveGreedy2", "EpsilonGreedy", "ExploreThenExploit", "FixedArmPolicy",
    "Policy", "RandomPolicy", "SoftmaxExplorer", "percentile",
    "POLICY_NAMES", "PolicyConfig", "make_policy", "WeightScheme", "RngStream",
    "SimConfig", "run_experiment", "run_simulation",
]
