"""Cold-start guards for arms with little or one-sided history.

Two wrappers are provided: additive smoothing of the oracle estimate, and the
"MAB-first" gate that scores an arm with a Beta posterior draw until it has
seen ``m`` observations of each reward class.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import as_generator

__all__ = ["SmoothingConfig", "MabFirstConfig", "smooth", "mab_first_gated",
           "mab_first_score", "smoothed_score"]


@dataclass(frozen=True)
class SmoothingConfig:
    a: float = 3.0
    b: float = 7.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("smoothing constants must be positive")
        if not self.a < self.b:
            raise ValueError("smoothing requires a < b")


@dataclass(frozen=True)
class MabFirstConfig:
    a: float = 3.0
    b: float = 7.0
    m: int = 2

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Beta prior parameters must be positive")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("threshold m must be a positive integer")


def smooth(r_hat, n, cfg: SmoothingConfig):
    """``(n * r_hat + a) / (n + b)``; works elementwise on arrays."""
    return (n * r_hat + cfg.a) / (n + cfg.b)


def smoothed_score(n_pos: int, n_neg: int, cfg: SmoothingConfig, inner: Callable, x) -> float:
    """Smoothed estimate for one arm.

    An arm whose history holds a single class predicts that class label
    instead of calling ``inner``.
    """
    n = n_pos + n_neg
    if n_pos == 0:
        r_hat = 0.0
    elif n_neg == 0:
        r_hat = 1.0
    else:
        r_hat = inner(x)
    return smooth(r_hat, n, cfg)


def mab_first_gated(n_pos, n_neg, cfg: MabFirstConfig):
    """True while the arm still plays the context-free Beta bandit."""
    return (np.asarray(n_neg) < cfg.m) | (np.asarray(n_pos) < cfg.m)


def mab_first_score(history, cfg: MabFirstConfig, inner: Callable, x, rng) -> float:
    """Score one arm through the MAB-first gate.

    ``history`` only needs ``n_pos`` and ``n_neg`` attributes.
    """
    if mab_first_gated(history.n_pos, history.n_neg, cfg):
        gen = as_generator(rng)
        return float(gen.beta(cfg.a + history.n_pos, cfg.b + history.n_neg))
    return inner(x)
