"""Arm-selection policies driven by per-arm classification oracles.

Every policy exposes the same two calls::

    decision = policy.select(x)          # -> Decision(arm, scores, branch)
    policy.update(x, decision.arm, reward)

Oracles are logistic regressions (see :mod:`bandit_forge.oracle`). In
full-refit mode they are refit on the arm's whole history every
``refit_every`` rounds; in online mode every update applies one SGD step per
oracle. The cold-start wrapper (MAB-first or smoothing) always sees the arm
in the same state its oracle was last fitted on.
"""
from __future__ import annotations

import math
from collections import deque
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.special import expit

from .coldstart import MabFirstConfig, SmoothingConfig, mab_first_gated, smooth
from .errors import ArmOutOfRange, DimensionMismatch
from .oracle import ArmHistory, OracleModel, fit_full, partial_fit, DEFAULT_STEP
from .resampling import WeightScheme, draw_weights, refit_resamples
from .rng import RngStream, as_generator

__all__ = [
    "Decision", "Policy", "RandomPolicy", "FixedArmPolicy", "BestArmMAB",
    "EpsilonGreedy", "ExploreThenExploit", "SoftmaxExplorer",
    "BootstrappedUCB", "BootstrappedTS", "ContextualAdaptiveGreedy",
    "ContextualAdaptiveGreedy2", "percentile", "softmax_probabilities",
    "argmax_random_tie", "SCORE_CLIP",
]

SCORE_CLIP = 1e-12

ColdStart = Optional[Union[MabFirstConfig, SmoothingConfig]]


class Decision(NamedTuple):
    arm: int
    scores: Optional[np.ndarray] = None
    branch: str = "greedy"


def percentile(values, p: float, axis: int = -1):
    """Linear-interpolation percentile: rank ``p/100 * (n-1)`` of the sorted values."""
    v = np.sort(np.asarray(values, dtype=float), axis=axis)
    n = v.shape[axis]
    rank = (p / 100.0) * (n - 1)
    lo = int(math.floor(rank))
    hi = min(lo + 1, n - 1)
    frac = rank - lo
    v_lo = np.take(v, lo, axis=axis)
    v_hi = np.take(v, hi, axis=axis)
    out = v_lo + frac * (v_hi - v_lo)
    return float(out) if np.ndim(out) == 0 else out


def softmax_probabilities(scores, multiplier: float) -> np.ndarray:
    """Softmax of ``multiplier * logit(scores)``, with scores clipped away from 0 and 1."""
    s = np.clip(np.asarray(scores, dtype=float), SCORE_CLIP, 1.0 - SCORE_CLIP)
    logits = multiplier * np.log(s / (1.0 - s))
    logits -= logits.max()
    e = np.exp(logits)
    return e / e.sum()


def argmax_random_tie(scores, rng: np.random.Generator) -> int:
    """Index of the maximum; ties broken uniformly at random."""
    scores = np.asarray(scores)
    best = np.flatnonzero(scores == scores.max())
    if best.shape[0] == 1:
        return int(best[0])
    return int(best[rng.integers(best.shape[0])])


class Policy:
    """Shared state and bookkeeping for all policies.

    Parameters
    ----------
    n_arms, n_features : int
    coldstart : MabFirstConfig, SmoothingConfig or None
    l2_lambda : float
        Regularisation strength shared by every oracle.
    refit_every : int
        Full-refit period, counted in rounds across all arms.
    online : bool
        Use SGD updates instead of periodic full refits.
    rng : RngStream, int or numpy Generator
    """

    name = "policy"
    uses_oracles = True
    n_models = 1
    weight_scheme = WeightScheme.GAMMA11

    def __init__(self, n_arms: int, n_features: int, *, coldstart: ColdStart = None,
                 l2_lambda: float = 1.0, refit_every: int = 50, online: bool = False,
                 step_size: float = DEFAULT_STEP, rng=0):
        if n_arms < 1:
            raise ValueError("need at least one arm")
        if refit_every < 1:
            raise ValueError("refit_every must be >= 1")
        self.n_arms = int(n_arms)
        self.n_features = int(n_features)
        self.coldstart = coldstart
        self.l2_lambda = float(l2_lambda)
        self.refit_every = int(refit_every)
        self.online = bool(online)
        self.step_size = float(step_size)
        self.stream = rng if isinstance(rng, RngStream) else None
        self.rng = as_generator(rng)
        self.round = 0
        self._pending: Optional[int] = None

        k, m, d = self.n_arms, self.n_models, self.n_features
        self.histories = [ArmHistory(d) for _ in range(k)]
        self.models = [[OracleModel.zeros(d, self.l2_lambda) for _ in range(m)]
                       for _ in range(k)]
        self._coef = np.zeros((k * m, d))
        self._bias = np.zeros(k * m)
        # class counts of the data each arm's oracle was last fitted on
        self.seen_pos = np.zeros(k, dtype=np.int64)
        self.seen_neg = np.zeros(k, dtype=np.int64)
        self._dirty = np.zeros(k, dtype=bool)
        self._fit_rngs: dict = {}

    # ----- scoring -----------------------------------------------------
    def _check_context(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.n_features:
            raise DimensionMismatch(
                f"context has {x.shape[0]} features, policy expects {self.n_features}")
        return x

    def oracle_probabilities(self, x) -> np.ndarray:
        """Raw oracle outputs, shape ``(n_arms, n_models)``; 0.5 where unfitted."""
        z = self._coef @ x + self._bias
        return expit(z).reshape(self.n_arms, self.n_models)

    def _inner_scores(self, x) -> np.ndarray:
        return self.oracle_probabilities(x)[:, 0]

    def wrapped_scores(self, x) -> np.ndarray:
        """Per-arm scores after the cold-start wrapper."""
        inner = self._inner_scores(x)
        cs = self.coldstart
        if cs is None:
            return inner
        pos, neg = self.seen_pos, self.seen_neg
        if isinstance(cs, SmoothingConfig):
            r_hat = np.where(pos == 0, 0.0, np.where(neg == 0, 1.0, inner))
            return smooth(r_hat, pos + neg, cs)
        gated = mab_first_gated(pos, neg, cs)
        if not gated.any():
            return inner
        out = inner.copy()
        out[gated] = self.rng.beta(cs.a + pos[gated], cs.b + neg[gated])
        return out

    def score_arm(self, arm: int, x) -> float:
        self._check_arm(arm)
        x = self._check_context(x)
        return float(self.wrapped_scores(x)[arm])

    # ----- selection ----------------------------------------------------
    def select(self, x) -> Decision:
        x = self._check_context(x)
        decision = self._select(x)
        self._pending = decision.arm
        return decision

    def _select(self, x) -> Decision:
        raise NotImplementedError

    def _greedy(self, scores) -> Decision:
        return Decision(argmax_random_tie(scores, self.rng), scores, "greedy")

    def _random(self, scores=None) -> Decision:
        return Decision(int(self.rng.integers(self.n_arms)), scores, "random")

    # ----- learning -----------------------------------------------------
    def _check_arm(self, arm):
        if not 0 <= arm < self.n_arms:
            raise ArmOutOfRange(f"arm {arm} outside [0, {self.n_arms})")

    def update(self, x, arm: int, reward: int) -> None:
        self._check_arm(arm)
        if self._pending is None or arm != self._pending:
            raise ArmOutOfRange(f"arm {arm} was not the arm selected this round")
        x = self._check_context(x)
        reward = int(reward)
        self._pending = None
        self.round += 1
        if not self.uses_oracles:
            # context-free baselines only need the class counts
            if reward:
                self.seen_pos[arm] += 1
            else:
                self.seen_neg[arm] += 1
            return
        self.histories[arm].append(x, reward)
        if self.online:
            self._online_update(arm, x, reward)
        else:
            self._dirty[arm] = True
            if self.round % self.refit_every == 0:
                self.refit()

    def fit_rng(self, arm: int) -> np.random.Generator:
        """Per-arm stream used for resampling and online weights."""
        gen = self._fit_rngs.get(arm)
        if gen is None:
            if self.stream is not None:
                gen = self.stream.child("fit", arm).generator()
            else:
                gen = np.random.Generator(np.random.PCG64(self.rng.integers(2**63)))
            self._fit_rngs[arm] = gen
        return gen

    def _observation_weights(self, arm: int) -> np.ndarray:
        return np.ones(self.n_models)

    def _online_update(self, arm, x, reward):
        weights = self._observation_weights(arm)
        new = []
        for model, w in zip(self.models[arm], weights):
            if self.weight_scheme is WeightScheme.POISSON:
                batch = [(x, reward, 1.0)] * int(w)
            else:
                batch = [(x, reward, w)]
            new.append(partial_fit(model, batch, self.step_size))
        self._set_models(arm, new)
        self.seen_pos[arm] = self.histories[arm].n_pos
        self.seen_neg[arm] = self.histories[arm].n_neg

    def refit(self) -> None:
        """Refit the oracles of every arm that gained data since its last fit."""
        for arm in np.flatnonzero(self._dirty):
            h = self.histories[arm]
            if h.two_class:
                self._set_models(arm, self._fit_arm(arm, h))
            self.seen_pos[arm] = h.n_pos
            self.seen_neg[arm] = h.n_neg
        self._dirty[:] = False

    def _fit_arm(self, arm, history):
        return [fit_full(history, self.l2_lambda, warm_start=self.models[arm][0])]

    def _set_models(self, arm, models):
        self.models[arm] = list(models)
        m = self.n_models
        for s, model in enumerate(models):
            self._coef[arm * m + s] = model.weights
            self._bias[arm * m + s] = model.bias

    def params(self) -> dict:
        return {"name": self.name}


class RandomPolicy(Policy):
    """Uniformly random arm every round."""

    name = "random"
    uses_oracles = False

    def _select(self, x):
        return self._random()


class FixedArmPolicy(Policy):
    """Always plays the same arm (reference baseline)."""

    name = "fixed-arm"
    uses_oracles = False

    def __init__(self, n_arms, n_features, *, arm: int = 0, **kw):
        super().__init__(n_arms, n_features, **kw)
        self._check_arm(arm)
        self.arm = int(arm)

    def _select(self, x):
        return Decision(self.arm, None, "fixed")

    def params(self):
        return {"name": self.name, "arm": self.arm}


class BestArmMAB(Policy):
    """Context-free Beta-Bernoulli Thompson sampling over arm means."""

    name = "best-arm-mab"
    uses_oracles = False

    def _select(self, x):
        scores = self.rng.beta(1.0 + self.seen_pos, 1.0 + self.seen_neg)
        return self._greedy(scores)


class EpsilonGreedy(Policy):
    name = "epsilon-greedy"

    def __init__(self, n_arms, n_features, *, explore_prob: float = 0.2,
                 decay: float = 0.9999, **kw):
        super().__init__(n_arms, n_features, **kw)
        if not 0.0 <= explore_prob <= 1.0:
            raise ValueError("explore_prob must lie in [0, 1]")
        if not 0.0 < decay <= 1.0:
            raise ValueError("decay must lie in (0, 1]")
        self.explore_prob = float(explore_prob)
        self.decay = float(decay)

    def _select(self, x):
        explore = self.rng.random() < self.explore_prob
        decision = self._random() if explore else self._greedy(self.wrapped_scores(x))
        self.explore_prob *= self.decay
        return decision

    def params(self):
        return {"name": self.name, "explore_prob": self.explore_prob, "decay": self.decay}


class ExploreThenExploit(Policy):
    """Uniform exploration before ``breakpoint`` rounds, raw-oracle argmax after.

    No cold-start wrapper is applied; arms whose history cannot be fitted
    keep the unfitted 0.5 score.
    """

    name = "explore-then-exploit"

    def __init__(self, n_arms, n_features, *, breakpoint: int = 2000, **kw):
        kw["coldstart"] = None
        super().__init__(n_arms, n_features, **kw)
        self.breakpoint = int(breakpoint)

    def _select(self, x):
        if self.round < self.breakpoint:
            return self._random()
        return self._greedy(self._inner_scores(x))

    def params(self):
        return {"name": self.name, "breakpoint": self.breakpoint}


class SoftmaxExplorer(Policy):
    name = "softmax-explorer"

    def __init__(self, n_arms, n_features, *, multiplier: float = 2.0,
                 inflation: float = 1.001, **kw):
        super().__init__(n_arms, n_features, **kw)
        self.multiplier = float(multiplier)
        self.inflation = float(inflation)

    def _select(self, x):
        scores = self.wrapped_scores(x)
        probs = softmax_probabilities(scores, self.multiplier)
        arm = int(self.rng.choice(self.n_arms, p=probs))
        self.multiplier *= self.inflation
        return Decision(arm, scores, "sample")

    def params(self):
        return {"name": self.name, "multiplier": self.multiplier, "inflation": self.inflation}


class _Bootstrapped(Policy):
    """Arms hold ``n_resamples`` oracles fit on bootstrap resamples
    (full-refit mode) or updated with random observation weights (online)."""

    def __init__(self, n_arms, n_features, *, n_resamples: int = 10,
                 weight_scheme=WeightScheme.GAMMA11, **kw):
        if n_resamples < 1:
            raise ValueError("n_resamples must be >= 1")
        self.n_models = int(n_resamples)
        self.weight_scheme = WeightScheme(weight_scheme)
        if self.weight_scheme is WeightScheme.FULL_BOOTSTRAP:
            raise ValueError("online updates need a weight scheme, not the full bootstrap")
        super().__init__(n_arms, n_features, **kw)

    def _fit_arm(self, arm, history):
        return refit_resamples(history, self.n_models, self.l2_lambda,
                               self.fit_rng(arm), warm_start=self.models[arm])

    def _observation_weights(self, arm):
        return draw_weights(self.weight_scheme, self.n_models, self.fit_rng(arm))


class BootstrappedUCB(_Bootstrapped):
    """Arm score is a percentile of its resampled oracles' predictions."""

    name = "bootstrapped-ucb"

    def __init__(self, n_arms, n_features, *, percentile: float = 80.0, **kw):
        super().__init__(n_arms, n_features, **kw)
        if not 0.0 <= percentile <= 100.0:
            raise ValueError("percentile must lie in [0, 100]")
        self.percentile = float(percentile)

    def _inner_scores(self, x):
        return percentile(self.oracle_probabilities(x), self.percentile, axis=1)

    def _select(self, x):
        return self._greedy(self.wrapped_scores(x))

    def params(self):
        return {"name": self.name, "n_resamples": self.n_models,
                "percentile": self.percentile, "online": self.online}


class BootstrappedTS(_Bootstrapped):
    """Arm score comes from one resampled oracle chosen at random per arm."""

    name = "bootstrapped-ts"

    def _inner_scores(self, x):
        probs = self.oracle_probabilities(x)
        s = self.rng.integers(self.n_models, size=self.n_arms)
        return probs[np.arange(self.n_arms), s]

    def _select(self, x):
        return self._greedy(self.wrapped_scores(x))

    def params(self):
        return {"name": self.name, "n_resamples": self.n_models, "online": self.online}


class ContextualAdaptiveGreedy(Policy):
    """Greedy when the best score beats a decaying threshold, random otherwise."""

    name = "adaptive-greedy"

    def __init__(self, n_arms, n_features, *, threshold: Optional[float] = None,
                 decay: float = 0.9997, **kw):
        super().__init__(n_arms, n_features, **kw)
        self.threshold = default_threshold(n_arms) if threshold is None else float(threshold)
        self.decay = float(decay)

    def _select(self, x):
        scores = self.wrapped_scores(x)
        if scores.max() > self.threshold:
            decision = self._greedy(scores)
        else:
            decision = self._random(scores)
        self.threshold *= self.decay
        return decision

    def params(self):
        return {"name": self.name, "threshold": self.threshold, "decay": self.decay}


def default_threshold(n_arms: int) -> float:
    return 1.0 / (2.0 * math.sqrt(n_arms))


class ContextualAdaptiveGreedy2(Policy):
    """Adaptive-greedy whose threshold tracks a percentile of recent best scores.

    Once ``window_size`` best scores have been seen, the threshold becomes the
    ``percentile`` of the last ``window_size`` of them and the percentile
    itself decays by ``decay`` each round. With ``moving_window=False`` the
    threshold is only recomputed every ``window_size`` rounds, from the block
    of scores seen since the previous recomputation.
    """

    name = "adaptive-greedy-2"

    def __init__(self, n_arms, n_features, *, window_size: int = 500,
                 percentile: float = 30.0, initial_threshold: Optional[float] = None,
                 decay: float = 0.9997, moving_window: bool = True, **kw):
        super().__init__(n_arms, n_features, **kw)
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        self.window_size = int(window_size)
        self.percentile = float(percentile)
        self.threshold = (default_threshold(n_arms) if initial_threshold is None
                          else float(initial_threshold))
        self.initial_threshold = self.threshold
        self.decay = float(decay)
        self.moving_window = bool(moving_window)
        self.window = deque(maxlen=self.window_size)
        self.n_seen_scores = 0

    def _explore(self, x, scores) -> Decision:
        return self._random(scores)

    def _select(self, x):
        scores = self.wrapped_scores(x)
        best = float(scores.max())
        if best > self.threshold:
            decision = self._greedy(scores)
        else:
            decision = self._explore(x, scores)
        self._push(best)
        return decision

    def _push(self, best: float) -> None:
        self.window.append(best)
        self.n_seen_scores += 1
        t, m = self.n_seen_scores, self.window_size
        if t >= m:
            if self.moving_window or t % m == 0:
                self.threshold = percentile(self.window, self.percentile)
            self.percentile *= self.decay

    def params(self):
        return {"name": self.name, "window_size": self.window_size,
                "percentile": self.percentile, "initial_threshold": self.initial_threshold,
                "decay": self.decay, "moving_window": self.moving_window}
