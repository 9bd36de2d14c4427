"""
Bootstrap resamples and random observation weights
==================================================

Bootstrapped policies keep several oracles per arm. Full refits draw row
indices with replacement; online updates instead give each observation a
random weight (or a Poisson number of repeats).
"""
# %%
import numpy as np

from bandit_forge.oracle import ArmHistory
from bandit_forge.resampling import (WeightScheme, draw_resample_indices, draw_weights,
                                     refit_resamples)
from bandit_forge.rng import RngStream

stream = RngStream(seed=1)

# %%
# Moments of the online weighting schemes. Each has mean one; they differ in spread.
for scheme in WeightScheme:
    if not scheme.is_online:
        continue
    w = draw_weights(scheme, 200_000, stream.child(scheme.value).generator())
    print(f"{scheme.label:>13}: mean {w.mean():.3f}  var {w.var():.3f}  "
          f"share of zeros {np.mean(w == 0):.3f}")

# %%
# A bootstrap resample of ten rows: some rows repeat, others drop out.
print(np.sort(draw_resample_indices(10, stream.child("indices").generator())))

# %%
# Ten oracles fitted on ten resamples disagree more where data are scarce,
# which is what the upper-confidence policy exploits.
gen = np.random.default_rng(0)
history = ArmHistory(1)
for _ in range(40):
    x = gen.normal(0.0, 0.5)
    history.append([x], int(gen.random() < 1 / (1 + np.exp(-2 * x))))
models = refit_resamples(history, 10, 1.0, stream.child("refit"))
for x in (0.0, 2.5):
    preds = [1 / (1 + np.exp(-(m.weights[0] * x + m.bias))) for m in models]
    print(f"x = {x}: predictions range {min(preds):.3f} .. {max(preds):.3f}")
