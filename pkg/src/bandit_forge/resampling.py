"""Bootstrap resampling and online weighting schemes."""
from __future__ import annotations

import enum
from typing import List

import numpy as np

from .errors import EmptyPool, OneClassData, SchemeMismatch
from .oracle import ArmHistory, OracleModel, fit_logistic
from .rng import as_generator

__all__ = [
    "WeightScheme", "draw_resample_indices", "draw_weight", "draw_weights",
    "refit_resamples", "resample_weights", "MAX_REDRAWS",
]

MAX_REDRAWS = 100


class WeightScheme(str, enum.Enum):
    FULL_BOOTSTRAP = "bootstrap"
    POISSON = "poisson"
    UNIFORM = "uniform"
    GAMMA11 = "gamma11"
    GAMMA22 = "gamma22"

    @property
    def is_online(self) -> bool:
        return self is not WeightScheme.FULL_BOOTSTRAP

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    WeightScheme.FULL_BOOTSTRAP: "Bootstrap",
    WeightScheme.POISSON: "Poisson(1)",
    WeightScheme.UNIFORM: "Uniform(0,1)",
    WeightScheme.GAMMA11: "Gamma(1,1)",
    WeightScheme.GAMMA22: "Gamma(2,2)",
}


def draw_resample_indices(n: int, rng) -> np.ndarray:
    """``n`` indices drawn uniformly from ``[0, n)`` with replacement."""
    if n < 1:
        raise EmptyPool("cannot resample from an empty pool")
    return as_generator(rng).integers(0, n, size=n)


def draw_weights(scheme, size, rng) -> np.ndarray:
    """Vector of per-observation weights (or counts, for Poisson)."""
    scheme = WeightScheme(scheme)
    gen = as_generator(rng)
    if scheme is WeightScheme.POISSON:
        return gen.poisson(1.0, size=size).astype(float)
    if scheme is WeightScheme.GAMMA11:
        return gen.gamma(1.0, 1.0, size=size)
    if scheme is WeightScheme.GAMMA22:
        # shape 2, rate 2 -> numpy scale 1/2
        return gen.gamma(2.0, 0.5, size=size)
    if scheme is WeightScheme.UNIFORM:
        # numpy draws on [0, 1); 1 - u lies on (0, 1]
        return 1.0 - gen.random(size=size)
    raise SchemeMismatch("the full bootstrap resamples rows; it has no per-observation weight")


def draw_weight(scheme, rng) -> float:
    return float(draw_weights(scheme, None, rng))


def resample_weights(scheme, n: int, rng, y=None,
                     max_redraws: int = MAX_REDRAWS) -> np.ndarray:
    """Per-row weights emulating one resample of an ``n``-row sample.

    For the full bootstrap the weights are the occurrence counts of each row.
    When binary labels ``y`` are given, draws that leave only one class with
    positive weight are redrawn up to ``max_redraws`` times; after that the
    unit weights of the original sample are returned.
    """
    scheme = WeightScheme(scheme)
    gen = as_generator(rng)
    if y is not None:
        y = np.asarray(y)
    for _ in range(max_redraws):
        if scheme is WeightScheme.FULL_BOOTSTRAP:
            w = np.bincount(draw_resample_indices(n, gen), minlength=n).astype(float)
        else:
            w = draw_weights(scheme, n, gen)
        used = w > 0
        if not used.any():
            continue
        if y is not None and not (np.any(y[used] == 1) and np.any(y[used] == 0)):
            continue
        return w
    return np.ones(n)


def refit_resamples(history: ArmHistory, m: int, l2_lambda: float, rng,
                    warm_start=None) -> List[OracleModel]:
    """Fit ``m`` oracles, each on a bootstrap resample of ``history``.

    One-class resamples are redrawn (at most ``MAX_REDRAWS`` times) and then
    replaced by the full history.
    """
    if not history.two_class:
        raise OneClassData("the history itself holds a single class")
    gen = as_generator(rng)
    n = len(history)
    X, y, w = history.X, history.rewards, history.weights
    models = []
    for s in range(m):
        idx = None
        for _ in range(MAX_REDRAWS):
            cand = draw_resample_indices(n, gen)
            ys = y[cand]
            if ys.max() == 1 and ys.min() == 0:
                idx = cand
                break
        if idx is None:
            idx = np.arange(n)
        start = None if warm_start is None else warm_start[s]
        models.append(fit_logistic(X[idx], y[idx], w[idx], l2_lambda, start))
    return models
