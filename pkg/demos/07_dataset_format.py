"""
Sparse multilabel datasets
==========================

Datasets use the plain-text format of the Extreme Classification
Repository: a header with row, feature and label counts, then one line per
row with comma-separated labels followed by ``index:value`` features.
"""
# %%
from bandit_forge.datasets import (drop_most_common_labels, label_stats, parse_xc,
                                   restrict_arms, serialize_xc)

text = """4 5 4
0,2 0:1.0 3:0.5
1 1:2.0
 2:1.0 4:1.0
0,1,3 0:0.3 4:0.7
"""
ds = parse_xc(text)
print(ds.labels)
print(ds.features.toarray())

# %%
# Serialisation round-trips exactly.
assert parse_xc(serialize_xc(ds)).labels == ds.labels
print(serialize_xc(ds))

# %%
# Restricting to a random subset of arms, or dropping the most frequent labels.
small, kept = restrict_arms(ds, 2, seed=0)
print("kept labels", kept, "->", small.labels)
reduced, kept = drop_most_common_labels(ds, 1)
print("after dropping the top label:", label_stats(reduced))
