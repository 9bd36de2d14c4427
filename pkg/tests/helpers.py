import numpy as np
from scipy.special import logit


def freeze_scores(policy, probs):
    """Make every oracle of every arm predict ``probs[arm]`` whatever the context,
    and mark the arms as past any cold-start gate."""
    probs = np.asarray(probs, dtype=float)
    m = policy.n_models
    policy._coef[:] = 0.0
    policy._bias[:] = np.repeat(logit(probs), m)
    policy.seen_pos[:] = 10**6
    policy.seen_neg[:] = 10**6
    return policy


def freeze_linear(policy, coef, bias):
    """Identical frozen linear oracles across resamples: coef (k, d), bias (k,)."""
    m = policy.n_models
    policy._coef[:] = np.repeat(np.asarray(coef, dtype=float), m, axis=0)
    policy._bias[:] = np.repeat(np.asarray(bias, dtype=float), m)
    policy.seen_pos[:] = 10**6
    policy.seen_neg[:] = 10**6
    return policy
