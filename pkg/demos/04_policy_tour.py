"""
A tour of the policies
======================

Every policy follows the same select/update cycle. Here each one plays
through the same synthetic multilabel stream, where each label is an arm and
the reward is 1 when the chosen label belongs to the row.
"""
# %%
from bandit_forge.datasets import label_stats, synthetic_multilabel
from bandit_forge.registry import POLICY_NAMES, PolicyConfig, make_policy
from bandit_forge.rng import RngStream
from bandit_forge.simulator import run_policy_on

data = synthetic_multilabel(1500, 20, 12, seed=3, label_scale=4.0)
print(label_stats(data))

# %%
# One pass per policy. Oracles are refit every 50 rounds.
for name in POLICY_NAMES:
    params = {"arm": int(data.label_counts().argmax())} if name == "most-common" else {}
    policy = make_policy(PolicyConfig(name, params), data.n_labels, data.n_features,
                         RngStream(0, 1), refit_every=50)
    arms, rewards = run_policy_on(policy, data)
    print(f"{name:>24}: mean reward {rewards.mean():.3f}")

# %%
# Decisions record which rule fired, which makes behaviour easy to audit.
policy = make_policy(PolicyConfig("adaptive-greedy-2", {"window_size": 50}),
                     data.n_labels, data.n_features, RngStream(0, 2))
branches = []
for x, labels in list(data.rows())[:400]:
    d = policy.select(x)
    branches.append(d.branch)
    policy.update(x, d.arm, int(d.arm in labels))
print({b: branches.count(b) for b in set(branches)})
