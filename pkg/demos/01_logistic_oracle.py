"""
Per-arm logistic oracles
========================

Each arm of a policy owns a binary classifier that estimates the chance the
arm pays off in a given context. This demo fits one on a full history,
updates one incrementally, and looks at the gradient norms that active
exploration relies on.
"""
# %%
import numpy as np
from scipy.special import expit

from bandit_forge.oracle import (ArmHistory, OracleModel, fit_full, grad_norm,
                                 partial_fit, predict_proba)

gen = np.random.default_rng(0)
truth = np.array([1.5, -1.0, 0.5])
X = gen.standard_normal((300, 3))
y = (gen.random(300) < expit(X @ truth - 0.5)).astype(int)

# %%
# Full refit on the whole history. The bias is not regularized.
history = ArmHistory(3)
for x, r in zip(X, y):
    history.append(x, r)
model = fit_full(history, l2_lambda=1.0)
print("coefficients", np.round(model.weights, 3), "bias", round(model.bias, 3))

# %%
# Incremental updates: one stochastic-gradient step per observation, with a
# step size that shrinks as updates accumulate.
online = OracleModel.zeros(3, l2_lambda=1.0)
for epoch in range(5):
    for x, r in zip(X, y):
        online = partial_fit(online, [(x, r, 1.0)], step_size=0.1)
print("online coefficients", np.round(online.weights, 3))

# %%
# An unfitted oracle predicts 0.5 everywhere; a fitted one follows the data.
x_new = np.array([1.0, -1.0, 0.0])
print("unfitted", predict_proba(OracleModel.zeros(3), x_new))
print("full fit", round(predict_proba(model, x_new), 4))

# %%
# The gradient a hypothetical label would produce is |p - r| sqrt(|x|^2 + 1).
# A confident oracle expects a small update from the label it predicts.
for label in (0, 1):
    print(f"label {label}: gradient norm {grad_norm(model, x_new, label):.4f}")
