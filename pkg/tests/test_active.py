import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bandit_forge.active import (ActiveAdaptiveGreedy, ActiveCriterion, ActiveExplorer,
                                 active_score, active_scores)
from bandit_forge.errors import DimensionMismatch
from bandit_forge.oracle import OracleModel, grad_norm, predict_proba
from bandit_forge.policies import ContextualAdaptiveGreedy2
from helpers import freeze_linear, freeze_scores

finite = st.floats(-3, 3, allow_nan=False)


def model_of(w, b):
    return OracleModel(np.asarray(w, dtype=float), float(b), 1.0, True)


def test_zero_model_criteria():
    x = np.array([1.0, 1.0, 1.0])
    m = OracleModel.zeros(3)
    for c in ActiveCriterion:
        assert active_score(m, x, c) == pytest.approx(1.0)


def test_weighted_closed_form_on_random_cases():
    gen = np.random.default_rng(0)
    for _ in range(1000):
        w, b, x = gen.standard_normal(5), gen.standard_normal(), gen.standard_normal(5) * 2
        p = predict_proba(model_of(w, b), x)
        expected = 2 * p * (1 - p) * math.sqrt(x @ x + 1)
        assert abs(active_score(model_of(w, b), x) - expected) < 1e-10


def test_confident_model_limits():
    x = np.array([3.0, 4.0])
    m = model_of([10.0, 10.0], 0.0)
    p = predict_proba(m, x)
    assert active_score(m, x, "weighted") < 1e-20
    assert active_score(m, x, "max") == pytest.approx(p * math.sqrt(26))


@given(arrays(float, 3, elements=finite), st.floats(-3, 3), arrays(float, 3, elements=finite))
def test_weighted_lies_between_min_and_max(w, b, x):
    m = model_of(w, b)
    lo, mid, hi = (active_score(m, x, c) for c in ("min", "weighted", "max"))
    assert lo <= mid + 1e-15 and mid <= hi + 1e-15


@given(arrays(float, 3, elements=finite), st.floats(-3, 3), arrays(float, 3, elements=finite))
def test_vectorised_scores_match_single_model(w, b, x):
    m = model_of(w, b)
    for c in ActiveCriterion:
        assert active_scores([predict_proba(m, x)], x, c)[0] == pytest.approx(
            active_score(m, x, c), abs=1e-12)


def test_active_score_checks_dimension():
    with pytest.raises(DimensionMismatch):
        active_score(OracleModel.zeros(2), [1.0])
    with pytest.raises(DimensionMismatch):
        grad_norm(OracleModel.zeros(2), [1.0], 0)


def test_active_explorer_without_exploration_is_greedy():
    pol = freeze_scores(ActiveExplorer(4, 2, explore_prob=0.0, rng=0), [0.2, 0.6, 0.4, 0.1])
    decisions = [pol.select(np.ones(2)) for _ in range(300)]
    assert all(d.branch == "greedy" and d.arm == 1 for d in decisions)


def test_active_explorer_explore_frequency():
    pol = freeze_scores(ActiveExplorer(4, 2, explore_prob=0.15, rng=1), [0.2, 0.6, 0.4, 0.1])
    branches = [pol.select(np.ones(2)).branch for _ in range(10_000)]
    assert abs(np.mean([b == "active" for b in branches]) - 0.15) < 0.01


def test_identical_models_tie_and_split_evenly():
    pol = freeze_scores(ActiveExplorer(2, 2, explore_prob=1.0, rng=2), [0.3, 0.3])
    arms = np.array([pol.select(np.ones(2)).arm for _ in range(10_000)])
    assert abs(arms.mean() - 0.5) < 0.02


def test_active_branch_picks_most_uncertain_arm():
    # arm 2 sits at p = 0.5, the others are confident
    pol = freeze_scores(ActiveExplorer(3, 2, explore_prob=1.0, rng=0), [0.99, 0.02, 0.5])
    assert {pol.select(np.ones(2)).arm for _ in range(50)} == {2}


def test_active_uses_raw_oracle_not_coldstart_wrapper():
    pol = ActiveExplorer(3, 2, explore_prob=1.0, rng=0)
    pol._bias[:] = [4.0, -4.0, 0.0]
    # every arm is still gated; the explore branch must ignore the Beta draws
    assert {pol.select(np.ones(2)).arm for _ in range(30)} == {2}


def _pair(seed=0, **kw):
    gen = np.random.default_rng(seed)
    coef, bias = gen.standard_normal((4, 3)), gen.standard_normal(4)
    a = freeze_linear(ActiveAdaptiveGreedy(4, 3, rng=seed, **kw), coef, bias)
    b = freeze_linear(ContextualAdaptiveGreedy2(4, 3, rng=seed, **kw), coef, bias)
    return a, b, gen


def test_shared_greedy_branch_and_threshold_trace():
    a, b, gen = _pair(window_size=20, percentile=40, decay=0.999)
    for x in gen.standard_normal((400, 3)):
        da, db = a.select(x), b.select(x)
        assert da.branch in ("greedy", "active") and db.branch in ("greedy", "random")
        if da.branch == "greedy":
            assert db.branch == "greedy" and da.arm == db.arm
        else:
            assert db.branch == "random"
        assert a.threshold == b.threshold
        assert a.percentile == b.percentile


def test_active_adaptive_greedy_explores_deterministically():
    a, _, gen = _pair(window_size=5, initial_threshold=1.0)
    x = gen.standard_normal(3)
    z = active_scores(a.oracle_probabilities(x)[:, 0], x)
    d = a.select(x)
    assert d.branch == "active" and d.arm == int(np.argmax(z))
