"""
Cold-start guards
=================

An arm with little or one-sided history cannot support a classifier. Two
guards cover that phase: additive smoothing of the estimate, and a gate that
plays a Beta-Bernoulli bandit on the arm until it has seen enough of each
reward class.
"""
# %%
import numpy as np

from bandit_forge.coldstart import MabFirstConfig, SmoothingConfig, mab_first_score, smooth

# %%
# Smoothing pulls estimates from small samples towards a / b.
cfg = SmoothingConfig(a=3, b=7)
for n in (0, 5, 50, 5000):
    print(f"n = {n:>4}: raw 0.9 -> {smooth(0.9, n, cfg):.4f}")

# %%
# The gate draws from Beta(a + positives, b + negatives) until both counts reach m.


class Counts:
    def __init__(self, n_pos, n_neg):
        self.n_pos, self.n_neg = n_pos, n_neg


gate = MabFirstConfig(a=3, b=7, m=2)
gen = np.random.default_rng(0)
oracle = lambda x: 0.62
for counts in (Counts(0, 0), Counts(1, 8), Counts(2, 8)):
    draws = [mab_first_score(counts, gate, oracle, None, gen) for _ in range(5)]
    print(f"pos {counts.n_pos} neg {counts.n_neg}:", np.round(draws, 3))
