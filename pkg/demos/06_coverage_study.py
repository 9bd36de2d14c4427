"""
How well do resampled upper bounds cover the truth?
===================================================

For many synthetic samples, ten models are refit under each resampling or
weighting scheme and the 80th percentile of their predictions is taken as an
upper bound. The study reports the share of test points whose noiseless
expected value falls strictly below that bound.
"""
# %%
from dataclasses import replace

from bandit_forge.coverage import LINEAR_LARGE_BIAS, LOGISTIC_INDEPENDENT, run_coverage

# %%
# Linear model with a large intercept; a reduced number of samples keeps this quick.
result = run_coverage(LINEAR_LARGE_BIAS, sample_sizes=[25, 250, 2500], n_samples=30,
                      n_test=500, seed=0)
print(result.to_csv())

# %%
# Logistic model. With noise inside the link the bounds are conservative.
# Adding the same noise to the Bernoulli probability is shown for comparison.
for placement in ("logit", "probability"):
    spec = replace(LOGISTIC_INDEPENDENT, noise_on=placement)
    res = run_coverage(spec, schemes=["bootstrap", "gamma11"], sample_sizes=[1000],
                       n_samples=30, n_test=500, seed=0)
    print(placement, {s.value: round(100 * m, 1) for (_, s), m in res.mean.items()})
