"""Multilabel datasets in the Extreme Classification repository text format.

The format is a header ``n_rows n_features n_labels`` followed by one line
per row::

    l1,l2,... f1:v1 f2:v2 ...

Indices are 0-based by default. A line starting with a space has no labels.
"""
from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from typing import FrozenSet, List, Sequence, Tuple

import numpy as np
from scipy import sparse

from .errors import (HeaderMalformed, IndexOutOfRange, RowCountMismatch,
                     SubsetTooLarge, ValueUnparsable)
from .rng import as_generator

__all__ = ["MultilabelDataset", "parse_xc", "load_xc", "serialize_xc",
           "shuffle_rows", "restrict_arms", "drop_most_common_labels", "label_stats", "synthetic_multilabel"]


@dataclass(frozen=True)
class MultilabelDataset:
    """Rows of sparse features with a (possibly empty) label set each."""

    features: sparse.csr_matrix
    labels: Tuple[FrozenSet[int], ...]
    n_labels: int

    def __post_init__(self):
        if self.features.shape[0] != len(self.labels):
            raise ValueError("features and labels disagree on the number of rows")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def __len__(self):
        return self.n_rows

    def context(self, i: int) -> np.ndarray:
        return self.features[i].toarray().ravel()

    def rows(self):
        """Iterate ``(dense context, label set)`` pairs."""
        for i in range(self.n_rows):
            yield self.context(i), self.labels[i]

    def label_counts(self) -> np.ndarray:
        counts = np.zeros(self.n_labels, dtype=np.int64)
        for ls in self.labels:
            for lab in ls:
                counts[lab] += 1
        return counts


def _parse_header(line: str):
    parts = line.split()
    if len(parts) != 3:
        raise HeaderMalformed(f"expected 'n_rows n_features n_labels', got {line.strip()!r}", 1)
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise HeaderMalformed(f"non-integer header {line.strip()!r}", 1) from None
    if min(vals) < 0:
        raise HeaderMalformed("header counts must be non-negative", 1)
    return vals


def parse_xc(stream, one_based: bool = False) -> MultilabelDataset:
    """Parse a text stream (or string) in XC repository format."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    header = stream.readline()
    if not header:
        raise HeaderMalformed("empty input", 1)
    n_rows, n_features, n_labels = _parse_header(header)
    offset = 1 if one_based else 0
    indptr, indices, data = [0], [], []
    labels: List[FrozenSet[int]] = []
    for lineno, raw in enumerate(stream, start=2):
        line = raw.rstrip("\r\n")
        if not line:
            continue
        if line[0].isspace():
            lab_tok, feat_toks = "", line.split()
        else:
            toks = line.split()
            if ":" in toks[0]:
                lab_tok, feat_toks = "", toks
            else:
                lab_tok, feat_toks = toks[0], toks[1:]
        try:
            labs = [int(t) - offset for t in lab_tok.split(",") if t]
        except ValueError:
            raise ValueUnparsable(f"bad label list {lab_tok!r}", lineno) from None
        for lab in labs:
            if not 0 <= lab < n_labels:
                raise IndexOutOfRange(f"label {lab + offset} outside [0, {n_labels})", lineno)
        prev = -1
        for tok in feat_toks:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ValueUnparsable(f"feature token {tok!r} lacks ':'", lineno)
            try:
                idx = int(idx_s) - offset
                val = float(val_s)
            except ValueError:
                raise ValueUnparsable(f"bad feature token {tok!r}", lineno) from None
            if not 0 <= idx < n_features:
                raise IndexOutOfRange(f"feature {idx + offset} outside [0, {n_features})", lineno)
            if idx <= prev:
                raise ValueUnparsable("feature indices must be strictly increasing", lineno)
            prev = idx
            indices.append(idx)
            data.append(val)
        indptr.append(len(indices))
        labels.append(frozenset(labs))
    if len(labels) != n_rows:
        raise RowCountMismatch(f"header announces {n_rows} rows, found {len(labels)}")
    X = sparse.csr_matrix((np.asarray(data, dtype=np.float64),
                           np.asarray(indices, dtype=np.int64),
                           np.asarray(indptr, dtype=np.int64)),
                          shape=(n_rows, n_features))
    return MultilabelDataset(X, tuple(labels), n_labels)


def load_xc(path, one_based: bool = False) -> MultilabelDataset:
    """Read a dataset file; ``.gz`` files are decompressed transparently."""
    path = str(path)
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:
        return parse_xc(fh, one_based=one_based)


def serialize_xc(ds: MultilabelDataset) -> str:
    out = io.StringIO()
    out.write(f"{ds.n_rows} {ds.n_features} {ds.n_labels}\n")
    X = ds.features
    for i in range(ds.n_rows):
        labs = ",".join(str(lab) for lab in sorted(ds.labels[i]))
        lo, hi = X.indptr[i], X.indptr[i + 1]
        feats = " ".join(f"{int(j)}:{float(v)!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi]))
        out.write(f"{labs} {feats}".rstrip() + "\n" if labs else f" {feats}\n")
    return out.getvalue()


def shuffle_rows(ds: MultilabelDataset, seed) -> MultilabelDataset:
    perm = as_generator(seed).permutation(ds.n_rows)
    return _take(ds, perm)


def _take(ds, order) -> MultilabelDataset:
    return MultilabelDataset(ds.features[order], tuple(ds.labels[i] for i in order), ds.n_labels)


def _remap(ds, keep: Sequence[int]) -> MultilabelDataset:
    index = {int(old): new for new, old in enumerate(keep)}
    labels = tuple(frozenset(index[lab] for lab in ls if lab in index) for ls in ds.labels)
    return MultilabelDataset(ds.features, labels, len(keep))


def restrict_arms(ds: MultilabelDataset, k_subset: int, seed):
    """Keep a uniformly random subset of ``k_subset`` labels.

    Returns the reindexed dataset and the original indices of the kept labels
    (new label ``j`` was ``kept[j]``). Rows whose labels all fall outside the
    subset stay, with an empty label set.
    """
    if not 1 <= k_subset <= ds.n_labels:
        raise SubsetTooLarge(f"cannot keep {k_subset} of {ds.n_labels} labels")
    kept = np.sort(as_generator(seed).choice(ds.n_labels, size=k_subset, replace=False))
    return _remap(ds, kept), kept


def drop_most_common_labels(ds: MultilabelDataset, n_drop: int = 5):
    """Remove the ``n_drop`` most frequent labels (ties go to the lower index)."""
    counts = ds.label_counts()
    order = sorted(range(ds.n_labels), key=lambda j: (-counts[j], j))
    dropped = set(order[:n_drop])
    kept = np.array([j for j in range(ds.n_labels) if j not in dropped], dtype=np.int64)
    return _remap(ds, kept), kept


def label_stats(ds: MultilabelDataset) -> dict:
    """Summary figures in the style of a dataset description table."""
    counts = ds.label_counts()
    n_assign = int(counts.sum())
    most = int(counts.argmax()) if ds.n_labels else -1
    return {
        "n_rows": ds.n_rows,
        "n_features": ds.n_features,
        "n_labels": ds.n_labels,
        "labels_per_row": float(n_assign / ds.n_rows) if ds.n_rows else 0.0,
        "rows_per_label": float(n_assign / ds.n_labels) if ds.n_labels else 0.0,
        "most_common_label": most,
        "most_common_fraction": float(counts[most] / ds.n_rows) if ds.n_rows and most >= 0 else 0.0,
        "empty_rows": sum(1 for ls in ds.labels if not ls),
    }


def synthetic_multilabel(n_rows: int, n_features: int, n_labels: int, seed=0,
                         density: float = 0.3, label_scale: float = 3.0,
                         base_rate: float = 0.05) -> MultilabelDataset:
    """Random sparse non-negative features whose labels depend on them.

    Each label ``j`` is present independently with probability
    ``sigmoid(logit(base_rate * popularity_j) + label_scale * x @ w_j)`` for
    random unit directions ``w_j``, so context carries signal and label
    frequencies are skewed.
    """
    gen = as_generator(seed)
    X = sparse.random(n_rows, n_features, density=density, format="csr",
                      random_state=gen, data_rvs=gen.random)
    X.sort_indices()
    W = gen.standard_normal((n_features, n_labels))
    W /= np.linalg.norm(W, axis=0, keepdims=True)
    popularity = np.clip(base_rate * gen.exponential(1.0, n_labels), 1e-4, 0.9)
    score = np.log(popularity / (1 - popularity)) + label_scale * (X @ W)
    present = gen.random((n_rows, n_labels)) < 1.0 / (1.0 + np.exp(-score))
    labels = tuple(frozenset(np.flatnonzero(r).tolist()) for r in present)
    return MultilabelDataset(X, labels, n_labels)
