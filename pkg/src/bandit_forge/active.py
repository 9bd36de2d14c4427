"""Active-learning exploration: pick the arm whose oracle would learn most.

For a logistic oracle the per-observation gradient norm under label ``r`` is
``|p - r| * sqrt(||x||^2 + 1)``, so the probability-weighted criterion
reduces to ``2 p (1 - p) sqrt(||x||^2 + 1)``.
"""
from __future__ import annotations

import enum

import numpy as np

from .oracle import OracleModel, grad_norm, predict_proba
from .policies import ContextualAdaptiveGreedy2, Decision, Policy, argmax_random_tie

__all__ = ["ActiveCriterion", "active_score", "active_scores",
           "ActiveExplorer", "ActiveAdaptiveGreedy"]


class ActiveCriterion(str, enum.Enum):
    WEIGHTED = "weighted"
    MIN = "min"
    MAX = "max"


def active_score(model: OracleModel, x, criterion=ActiveCriterion.WEIGHTED) -> float:
    """Gradient-norm criterion for a single oracle and context."""
    criterion = ActiveCriterion(criterion)
    g0 = grad_norm(model, x, 0)
    g1 = grad_norm(model, x, 1)
    if criterion is ActiveCriterion.MIN:
        return min(g0, g1)
    if criterion is ActiveCriterion.MAX:
        return max(g0, g1)
    p = predict_proba(model, x)
    return (1.0 - p) * g0 + p * g1


def active_scores(probs, x, criterion=ActiveCriterion.WEIGHTED) -> np.ndarray:
    """Vectorised :func:`active_score` from per-arm oracle probabilities."""
    criterion = ActiveCriterion(criterion)
    probs = np.asarray(probs, dtype=float)
    scale = np.sqrt(x @ x + 1.0)
    g0 = probs * scale
    g1 = (1.0 - probs) * scale
    if criterion is ActiveCriterion.MIN:
        return np.minimum(g0, g1)
    if criterion is ActiveCriterion.MAX:
        return np.maximum(g0, g1)
    return (1.0 - probs) * g0 + probs * g1


class _ActiveMixin:
    criterion = ActiveCriterion.WEIGHTED

    def _active_decision(self, x, scores=None) -> Decision:
        # the gradient belongs to the raw oracle, not the cold-start wrapper
        z = active_scores(self.oracle_probabilities(x)[:, 0], x, self.criterion)
        return Decision(argmax_random_tie(z, self.rng), z, "active")


class ActiveExplorer(_ActiveMixin, Policy):
    """Greedy on wrapped scores, except with probability ``explore_prob``
    the arm with the largest gradient criterion is played."""

    name = "active-explorer"

    def __init__(self, n_arms, n_features, *, explore_prob: float = 0.15,
                 criterion=ActiveCriterion.WEIGHTED, **kw):
        super().__init__(n_arms, n_features, **kw)
        if not 0.0 <= explore_prob <= 1.0:
            raise ValueError("explore_prob must lie in [0, 1]")
        self.explore_prob = float(explore_prob)
        self.criterion = ActiveCriterion(criterion)

    def _select(self, x):
        if self.rng.random() < self.explore_prob:
            return self._active_decision(x)
        return self._greedy(self.wrapped_scores(x))

    def params(self):
        return {"name": self.name, "explore_prob": self.explore_prob,
                "criterion": self.criterion.value}


class ActiveAdaptiveGreedy(_ActiveMixin, ContextualAdaptiveGreedy2):
    """Windowed adaptive-greedy that explores by gradient criterion instead of at random."""

    name = "active-adaptive-greedy"

    def __init__(self, n_arms, n_features, *, criterion=ActiveCriterion.WEIGHTED, **kw):
        super().__init__(n_arms, n_features, **kw)
        self.criterion = ActiveCriterion(criterion)

    def _explore(self, x, scores):
        return self._active_decision(x, scores)

    def params(self):
        out = super().params()
        out["criterion"] = self.criterion.value
        return out
