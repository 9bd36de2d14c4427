"""Logistic-regression oracle: one binary classifier per arm.

The objective minimised by :func:`fit_full` is the weighted, L2-regularised
log-loss summed over observations::

    sum_i w_i * [log(1 + exp(z_i)) - r_i * z_i] + l2_lambda / 2 * ||weights||^2,
    z_i = weights . x_i + bias

The bias is not regularised. Online updates (:func:`partial_fit`) take one
stochastic-gradient step per observation with a decaying step size.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize
from scipy.special import expit

from .errors import DimensionMismatch, OneClassData

__all__ = [
    "OracleModel", "ArmHistory", "fit_full", "fit_logistic", "partial_fit",
    "predict_proba", "grad_norm", "logistic_loss", "sigmoid",
]

GRAD_TOL = 1e-8
MAX_ITER = 1000
# above this many coefficients the dense Newton solve gets expensive
NEWTON_MAX_DIM = 200
DEFAULT_STEP = 0.1

sigmoid = expit


@dataclass(frozen=True)
class OracleModel:
    """Fitted (or not yet fitted) logistic model for one arm.

    ``n_seen`` and ``n_updates`` only matter for online updates: they count
    the observations absorbed so far and drive the step-size schedule.
    """

    weights: np.ndarray
    bias: float = 0.0
    l2_lambda: float = 1.0
    fitted: bool = False
    n_seen: int = 0
    n_updates: int = 0

    @classmethod
    def zeros(cls, n_features: int, l2_lambda: float = 1.0) -> "OracleModel":
        return cls(np.zeros(n_features), 0.0, float(l2_lambda), False)

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def decision_function(self, x) -> np.ndarray:
        x = _check_x(self, x)
        return x @ self.weights + self.bias


class ArmHistory:
    """Append-only store of ``(x, reward, weight)`` rows for one arm."""

    def __init__(self, n_features: int, capacity: int = 16):
        self.n_features = int(n_features)
        self._X = np.empty((max(capacity, 1), self.n_features))
        self._r = np.empty(max(capacity, 1))
        self._w = np.empty(max(capacity, 1))
        self._n = 0
        self.n_pos = 0
        self.n_neg = 0

    def __len__(self):
        return self._n

    @classmethod
    def from_rows(cls, rows: Iterable[Tuple[Sequence[float], int, float]], n_features=None):
        rows = list(rows)
        if n_features is None:
            if not rows:
                raise ValueError("n_features is required for an empty history")
            n_features = len(rows[0][0])
        h = cls(n_features, capacity=len(rows))
        for row in rows:
            h.append(*row)
        return h

    def append(self, x, reward: int, weight: float = 1.0) -> None:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.n_features:
            raise DimensionMismatch(
                f"observation has {x.shape[0]} features, history expects {self.n_features}")
        if reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {reward!r}")
        if not weight > 0:
            raise ValueError("row weights must be strictly positive")
        if self._n == self._X.shape[0]:
            cap = 2 * self._X.shape[0]
            self._X = np.resize(self._X, (cap, self.n_features))
            self._r = np.resize(self._r, cap)
            self._w = np.resize(self._w, cap)
        self._X[self._n] = x
        self._r[self._n] = reward
        self._w[self._n] = weight
        self._n += 1
        if reward:
            self.n_pos += 1
        else:
            self.n_neg += 1

    @property
    def X(self) -> np.ndarray:
        return self._X[:self._n]

    @property
    def rewards(self) -> np.ndarray:
        return self._r[:self._n]

    @property
    def weights(self) -> np.ndarray:
        return self._w[:self._n]

    @property
    def two_class(self) -> bool:
        return self.n_pos > 0 and self.n_neg > 0


def _check_x(model: OracleModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != model.weights.shape[0]:
        raise DimensionMismatch(
            f"context has {x.shape[-1]} features, model expects {model.weights.shape[0]}")
    return x


def logistic_loss(weights, bias, X, y, sample_weight=None, l2_lambda=0.0) -> float:
    """Objective value of :func:`fit_full` at ``(weights, bias)``."""
    z = X @ weights + bias
    sw = np.ones_like(z) if sample_weight is None else sample_weight
    return float(sw @ (np.logaddexp(0.0, z) - y * z) + 0.5 * l2_lambda * weights @ weights)


def _loss_grad(theta, X, y, sw, lam):
    w, b = theta[:-1], theta[-1]
    z = X @ w + b
    resid = sw * (expit(z) - y)
    f = sw @ (np.logaddexp(0.0, z) - y * z) + 0.5 * lam * w @ w
    g = np.empty_like(theta)
    g[:-1] = X.T @ resid + lam * w
    g[-1] = resid.sum()
    return f, g


def _newton(X, y, sw, lam, theta, tol, max_iter):
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    reg = np.full(d + 1, lam)
    reg[-1] = 0.0
    f, g = _loss_grad(theta, X, y, sw, lam)
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol:
            break
        p = expit(Xa @ theta)
        H = (Xa.T * (sw * p * (1.0 - p))) @ Xa
        H[np.diag_indices_from(H)] += reg + 1e-12
        try:
            step = linalg.solve(H, g, assume_a="pos")
        except (linalg.LinAlgError, ValueError):
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        slope = g @ step
        t = 1.0
        while True:
            cand = theta - t * step
            f_new, g_new = _loss_grad(cand, X, y, sw, lam)
            if f_new <= f - 1e-4 * t * slope or t < 1e-12:
                break
            t *= 0.5
        if f_new > f:
            break
        theta, f, g = cand, f_new, g_new
        if t * np.max(np.abs(step)) < 1e-15:
            break
    return theta


def fit_logistic(X, y, sample_weight=None, l2_lambda: float = 1.0,
                 warm_start: Optional[OracleModel] = None,
                 tol: float = GRAD_TOL, max_iter: int = MAX_ITER) -> OracleModel:
    """Fit the regularised logistic model on arrays.

    Rows with zero weight are ignored when checking that both classes are
    present.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch("X must be 2-d with one row per label")
    sw = np.ones_like(y) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    if not l2_lambda > 0:
        raise ValueError("l2_lambda must be > 0 for full fits")
    active = sw > 0
    if not (np.any(y[active] == 1) and np.any(y[active] == 0)):
        raise OneClassData("need at least one observation of each class")
    d = X.shape[1]
    theta = np.zeros(d + 1)
    if warm_start is not None and warm_start.fitted:
        if warm_start.n_features != d:
            raise DimensionMismatch("warm start has the wrong dimensionality")
        theta[:-1] = warm_start.weights
        theta[-1] = warm_start.bias
    if d + 1 <= NEWTON_MAX_DIM:
        theta = _newton(X, y, sw, l2_lambda, theta, tol, max_iter)
    else:
        res = optimize.minimize(_loss_grad, theta, args=(X, y, sw, l2_lambda),
                                jac=True, method="L-BFGS-B",
                                options={"gtol": tol, "maxiter": max_iter})
        theta = res.x
    return OracleModel(theta[:-1].copy(), float(theta[-1]), float(l2_lambda), True)


def fit_full(history: ArmHistory, l2_lambda: float = 1.0,
             warm_start: Optional[OracleModel] = None) -> OracleModel:
    """Refit an arm's oracle on its whole weighted history."""
    if history.n_pos == 0 or history.n_neg == 0:
        raise OneClassData(
            f"history has {history.n_pos} positive and {history.n_neg} negative rows")
    return fit_logistic(history.X, history.rewards, history.weights, l2_lambda, warm_start)


def partial_fit(model: OracleModel, batch, step_size: float = DEFAULT_STEP) -> OracleModel:
    """One weighted SGD pass over ``batch`` (iterable of ``(x, reward, weight)``).

    Step ``t`` (counted over the model's lifetime) uses
    ``step_size / (1 + step_size * l2_lambda * t)``. The per-observation
    gradient is ``(p - r) * weight * x`` plus ``l2_lambda * weights / n_seen``
    for the coefficients. Zero-weight observations are skipped.
    """
    if not step_size > 0:
        raise ValueError("step_size must be > 0")
    w = model.weights.copy()
    b = model.bias
    lam = model.l2_lambda
    n_seen, n_updates = model.n_seen, model.n_updates
    touched = False
    for x, r, obs_w in batch:
        x = _check_x(model, x)
        if obs_w == 0:
            continue
        touched = True
        n_seen += 1
        eta = step_size / (1.0 + step_size * lam * n_updates)
        resid = (expit(x @ w + b) - r) * obs_w
        w = w - eta * (resid * x + lam * w / n_seen)
        b = b - eta * resid
        n_updates += 1
    if not touched:
        return model
    return replace(model, weights=w, bias=float(b), fitted=True,
                   n_seen=n_seen, n_updates=n_updates)


def predict_proba(model: OracleModel, x):
    """P(reward = 1 | x); 0.5 for an unfitted model. ``x`` may be 1-d or 2-d."""
    x = _check_x(model, x)
    if not model.fitted:
        return 0.5 if x.ndim == 1 else np.full(x.shape[0], 0.5)
    p = expit(x @ model.weights + model.bias)
    return float(p) if x.ndim == 1 else p


def grad_norm(model: OracleModel, x, hypothetical_label: int) -> float:
    """Norm of the un-regularised log-loss gradient w.r.t. (weights, bias)
    that observing ``(x, hypothetical_label)`` would produce."""
    x = _check_x(model, x)
    p = predict_proba(model, x)
    return float(abs(p - hypothetical_label) * np.sqrt(x @ x + 1.0))
