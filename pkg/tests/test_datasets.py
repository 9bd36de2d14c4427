import gzip
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bandit_forge.datasets import (drop_most_common_labels, label_stats, load_xc, parse_xc,
                                   restrict_arms, serialize_xc, shuffle_rows,
                                   synthetic_multilabel)
from bandit_forge.errors import (HeaderMalformed, IndexOutOfRange, RowCountMismatch,
                                 SubsetTooLarge, ValueUnparsable)


def test_small_example_parses():
    ds = parse_xc("2 3 2\n0 0:1.5 2:0.5\n1,0 1:1.0\n")
    assert ds.n_rows == 2 and ds.labels == (frozenset({0}), frozenset({0, 1}))
    np.testing.assert_array_equal(ds.features.toarray(), [[1.5, 0, 0.5], [0, 1.0, 0]])


def test_leading_space_means_no_labels():
    ds = parse_xc("2 2 3\n 0:1.0\n2 1:2.0\n")
    assert ds.labels == (frozenset(), frozenset({2}))


def test_one_based_indices():
    ds = parse_xc("1 2 2\n2 1:1.0 2:3.0\n", one_based=True)
    assert ds.labels[0] == {1}
    np.testing.assert_array_equal(ds.features.toarray(), [[1.0, 3.0]])


@pytest.mark.parametrize("text, error, line", [
    ("2 3\n", HeaderMalformed, 1),
    ("a b c\n", HeaderMalformed, 1),
    ("", HeaderMalformed, 1),
    ("1 3 2\n0 3:1.0\n", IndexOutOfRange, 2),
    ("1 3 2\n2 0:1.0\n", IndexOutOfRange, 2),
    ("2 3 2\n0 0:1.0\n", RowCountMismatch, None),
    ("1 3 2\n0 0:abc\n", ValueUnparsable, 2),
    ("1 3 2\nx 0:1.0\n", ValueUnparsable, 2),
    ("1 3 2\n0 2:1.0 1:1.0\n", ValueUnparsable, 2),
    ("1 3 2\n0 0\n", ValueUnparsable, 2),
])
def test_format_errors(text, error, line):
    with pytest.raises(error) as info:
        parse_xc(text)
    assert info.value.line == line


@given(st.integers(1, 30), st.integers(1, 8), st.integers(1, 6), st.integers(0, 1000))
def test_serialize_then_parse_is_identity(rows, feats, labels, seed):
    ds = synthetic_multilabel(rows, feats, labels, seed=seed, density=0.5)
    again = parse_xc(serialize_xc(ds))
    assert again.labels == ds.labels and again.n_labels == ds.n_labels
    assert (again.features != ds.features).nnz == 0
    assert again.features.shape == ds.features.shape


def test_gzip_files_are_read(tmp_path):
    text = "2 3 2\n0 0:1.5 2:0.5\n1,0 1:1.0\n"
    path = tmp_path / "d.txt.gz"
    with gzip.open(path, "wt") as fh:
        fh.write(text)
    assert load_xc(path).labels == parse_xc(text).labels


def test_shuffle_single_row_is_identity():
    ds = parse_xc("1 2 2\n1 0:1.0\n")
    assert shuffle_rows(ds, 5).labels == ds.labels


def test_shuffle_preserves_content_and_depends_on_seed():
    ds = synthetic_multilabel(150, 5, 4, seed=0)
    a, b = shuffle_rows(ds, 1), shuffle_rows(ds, 2)
    assert Counter(a.labels) == Counter(ds.labels)
    rows = lambda d: sorted(map(tuple, d.features.toarray().tolist()))
    assert rows(a) == rows(ds)
    assert a.features.toarray().tolist() != b.features.toarray().tolist()
    assert shuffle_rows(ds, 1).labels == a.labels


def test_restrict_to_all_labels_is_a_relabelling():
    ds = synthetic_multilabel(50, 4, 6, seed=1)
    sub, kept = restrict_arms(ds, 6, 0)
    np.testing.assert_array_equal(kept, np.arange(6))
    assert sub.labels == ds.labels


def test_restrict_keeps_rows_and_reindexes():
    ds = synthetic_multilabel(80, 4, 10, seed=2)
    sub, kept = restrict_arms(ds, 3, 7)
    assert sub.n_rows == ds.n_rows and sub.n_labels == 3
    for old, new in zip(ds.labels, sub.labels):
        assert {int(kept[j]) for j in new} == old & set(kept.tolist())


def test_restricting_to_an_absent_label_empties_every_row():
    ds = parse_xc("3 1 3\n0 0:1\n0,1 0:1\n1 0:1\n")
    for seed in range(20):
        sub, kept = restrict_arms(ds, 1, seed)
        if kept[0] == 2:
            assert all(not ls for ls in sub.labels)
            break
    else:
        pytest.fail("label 2 never drawn")


def test_subset_too_large():
    with pytest.raises(SubsetTooLarge):
        restrict_arms(parse_xc("1 1 2\n0 0:1\n"), 3, 0)


def test_drop_most_common_labels():
    text = "5 1 4\n0,1 0:1\n0,1 0:1\n0,2 0:1\n0 0:1\n3 0:1\n"
    ds, kept = drop_most_common_labels(parse_xc(text), 2)
    np.testing.assert_array_equal(kept, [2, 3])
    assert ds.labels == (frozenset(), frozenset(), frozenset({0}), frozenset(), frozenset({1}))


def test_label_stats():
    stats = label_stats(parse_xc("4 1 3\n0,1 0:1\n0 0:1\n 0:1\n2 0:1\n"))
    assert stats["most_common_label"] == 0
    assert stats["most_common_fraction"] == pytest.approx(0.5)
    assert stats["labels_per_row"] == pytest.approx(1.0)
    assert stats["empty_rows"] == 1
