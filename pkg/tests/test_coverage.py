import numpy as np
import pytest

from bandit_forge.coverage import (DEFAULT_SAMPLE_SIZES, LINEAR_LARGE_BIAS, LOGISTIC_CORRELATED,
                                   LOGISTIC_INDEPENDENT, GeneratorSpec, coverage_proportion,
                                   estimate_bounds, gen_sample, gen_test_set, run_coverage)
from bandit_forge.errors import CovarianceNotPSD, OneClassData
from bandit_forge.resampling import WeightScheme


def test_noiseless_linear_sample_is_exact():
    spec = GeneratorSpec("linear", (1.05, -2.35, 0.15), 8.0, (0, 0, 0), sd=(1, 1, 1), noise_sd=0)
    X, y = gen_sample(spec, 50, 0)
    np.testing.assert_allclose(y, X @ np.array([1.05, -2.35, 0.15]) + 8.0)


def test_logistic_presets():
    assert LOGISTIC_INDEPENDENT.bias == -2.0
    assert LOGISTIC_INDEPENDENT.coefficients == (1.05, -2.35, 0.15)
    assert LOGISTIC_INDEPENDENT.sd == (0.5, 0.5, 0.5) and LOGISTIC_INDEPENDENT.noise_sd == 0.5
    X, y = gen_sample(LOGISTIC_CORRELATED, 20_000, 1)
    np.testing.assert_allclose(np.cov(X.T), np.asarray(LOGISTIC_CORRELATED.cov), atol=0.1)
    assert set(np.unique(y)) == {0.0, 1.0}


def test_non_psd_covariance_is_rejected():
    with pytest.raises(CovarianceNotPSD):
        GeneratorSpec("logistic", (1, 1), 0, (0, 0), cov=((1, 2), (2, 1)))


def test_test_set_expected_values():
    lin = GeneratorSpec("linear", (0, 0, 0), 8.0, (0, 0, 0), sd=(1, 1, 1))
    assert np.all(gen_test_set(lin, 10, 0)[1] == 8.0)
    logi = GeneratorSpec("logistic", (0, 0), 0.0, (0, 0), sd=(1, 1))
    assert np.all(gen_test_set(logi, 10, 0)[1] == 0.5)
    assert gen_test_set(LOGISTIC_INDEPENDENT, 1000, 0)[0].shape == (1000, 3)


def test_noise_placement_option():
    spec = GeneratorSpec("logistic", (0.0,), 0.0, (0.0,), sd=(1.0,), noise_sd=0.0,
                         noise_on="probability")
    _, y = gen_sample(spec, 20_000, 0)
    assert abs(y.mean() - 0.5) < 0.02
    with pytest.raises(ValueError):
        GeneratorSpec("logistic", (0.0,), 0.0, (0.0,), sd=(1.0,), noise_on="elsewhere")


def test_constant_targets_give_constant_bound():
    X = np.random.default_rng(0).standard_normal((30, 2))
    y = np.full(30, 4.0)
    X_test = np.random.default_rng(1).standard_normal((10, 2))
    for scheme in WeightScheme:
        b = estimate_bounds(X, y, scheme, 10, 80, X_test, 0, kind="linear")
        np.testing.assert_allclose(b, 4.0, atol=1e-9)


def test_duplicated_rows_make_every_bootstrap_identical():
    X = np.tile([[1.0, 2.0]], (5, 1))
    y = np.full(5, 3.0)
    X_test = np.array([[1.0, 2.0], [0.0, 0.0]])
    b = estimate_bounds(X, y, "bootstrap", 10, 80, X_test, 0, kind="linear")
    ref = estimate_bounds(X, y, "bootstrap", 1, 50, X_test, 1, kind="linear")
    np.testing.assert_allclose(b, ref)
    assert b[0] == pytest.approx(3.0)


def test_infinite_bounds_cover_everything():
    assert coverage_proportion(np.arange(5.0), np.full(5, np.inf)) == 1.0
    assert coverage_proportion([1.0, 2.0], [1.0, 2.0]) == 0.0


def test_coverage_is_order_invariant():
    gen = np.random.default_rng(0)
    e, b = gen.random(100), gen.random(100)
    perm = gen.permutation(100)
    assert coverage_proportion(e, b) == coverage_proportion(e[perm], b[perm])


def test_raising_the_percentile_never_lowers_a_bound():
    X, y = gen_sample(LOGISTIC_INDEPENDENT, 200, 3)
    X_test, _ = gen_test_set(LOGISTIC_INDEPENDENT, 50, 4)
    prev = None
    for pct in (10, 30, 50, 80, 95, 100):
        b = estimate_bounds(X, y, "gamma11", 10, pct, X_test, 7)
        if prev is not None:
            assert np.all(b >= prev - 1e-15)
        prev = b


def test_one_class_logistic_sample_is_rejected():
    with pytest.raises(OneClassData):
        estimate_bounds(np.ones((4, 1)), np.ones(4), "gamma11", 3, 80, np.ones((2, 1)), 0)


def test_default_grid():
    assert len(DEFAULT_SAMPLE_SIZES) == 16
    assert DEFAULT_SAMPLE_SIZES[0] == 10 and DEFAULT_SAMPLE_SIZES[-1] == 10000


def test_run_coverage_shapes_and_determinism():
    kw = dict(schemes=["gamma11", "bootstrap"], sample_sizes=[20, 60], n_samples=6,
              n_resamples=5, n_test=100, seed=3)
    a = run_coverage(LOGISTIC_INDEPENDENT, **kw)
    b = run_coverage(LOGISTIC_INDEPENDENT, jobs=2, **kw)
    assert a.to_csv() == b.to_csv()
    assert len(list(a.rows())) == 4
    for p in a.proportions.values():
        assert p.shape == (6,) and np.all((0 <= p) & (p <= 1))
    assert all(s >= 0 for s in a.std.values())
    assert a.to_csv("x").splitlines()[:2] == ["# x", "sample_size,scheme,mean_pct,std_pct"]


def test_run_coverage_validates_counts():
    with pytest.raises(ValueError):
        run_coverage(LOGISTIC_INDEPENDENT, n_samples=0)


def test_spread_shrinks_with_sample_size():
    res = run_coverage(LOGISTIC_INDEPENDENT, sample_sizes=[10, 10000], n_samples=20,
                       n_resamples=10, n_test=300, seed=1)
    for scheme in WeightScheme:
        assert res.std[(10000, scheme)] < res.std[(10, scheme)]


def test_linear_large_bias_bounds_are_near_nominal():
    res = run_coverage(LINEAR_LARGE_BIAS, schemes=["bootstrap"], sample_sizes=[1000],
                       n_samples=30, n_resamples=10, n_test=300, seed=0)
    assert 0.6 < res.mean[(1000, WeightScheme.FULL_BOOTSTRAP)] < 0.9
