"""Coverage of resampling-based upper confidence bounds on synthetic data.

For each sample size, many samples are drawn from a fixed linear or logistic
data-generating process. Each sample yields an upper bound per test point (a
percentile of the predictions of models refit under a resampling or
weighting scheme), and the statistic reported is the fraction of test points
whose noiseless expected value lies strictly below its bound.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import io
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from .errors import CovarianceNotPSD, OneClassData
from .oracle import fit_logistic
from .policies import percentile
from .resampling import WeightScheme, resample_weights
from .rng import RngStream, as_generator, derive_stream_id

__all__ = ["GeneratorSpec", "CoverageResult", "gen_sample", "gen_test_set",
           "estimate_bounds", "coverage_proportion", "run_coverage",
           "LINEAR_LARGE_BIAS", "LOGISTIC_INDEPENDENT", "LOGISTIC_CORRELATED",
           "DEFAULT_SAMPLE_SIZES", "PRESETS", "LOGISTIC_L2"]

LOGISTIC_L2 = 1e-6

DEFAULT_SAMPLE_SIZES = (10, 15, 25, 39, 63, 100, 158, 251, 398, 630,
                        1000, 1584, 2511, 3981, 6309, 10000)


@dataclass(frozen=True)
class GeneratorSpec:
    """Data-generating process for the coverage study.

    Features are Normal with mean ``mean`` and either independent standard
    deviations ``sd`` or a full covariance matrix ``cov``. The linear score is
    ``X @ coefficients + bias + noise`` with ``noise ~ Normal(0, noise_sd)``;
    for ``kind="logistic"`` the target is a Bernoulli draw of its sigmoid.
    With ``noise_on="probability"`` the logistic noise is instead added to
    the Bernoulli parameter itself (clipped to [0, 1]).
    """

    kind: str
    coefficients: Tuple[float, ...]
    bias: float
    mean: Tuple[float, ...]
    sd: Optional[Tuple[float, ...]] = None
    cov: Optional[Tuple[Tuple[float, ...], ...]] = None
    noise_sd: float = 1.0
    noise_on: str = "logit"

    def __post_init__(self):
        if self.noise_on not in ("logit", "probability"):
            raise ValueError("noise_on must be 'logit' or 'probability'")
        if self.kind not in ("linear", "logistic"):
            raise ValueError("kind must be 'linear' or 'logistic'")
        if (self.sd is None) == (self.cov is None):
            raise ValueError("give exactly one of sd (independent) or cov (correlated)")
        if self.cov is not None:
            c = np.asarray(self.cov, dtype=float)
            if c.shape != (len(self.mean), len(self.mean)) or not np.allclose(c, c.T):
                raise CovarianceNotPSD("covariance must be a symmetric square matrix")
            if np.linalg.eigvalsh(c).min() < -1e-10:
                raise CovarianceNotPSD("covariance matrix has a negative eigenvalue")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")

    @property
    def n_features(self) -> int:
        return len(self.coefficients)

    def features(self, n: int, gen: np.random.Generator) -> np.ndarray:
        mean = np.asarray(self.mean, dtype=float)
        if self.cov is not None:
            return gen.multivariate_normal(mean, np.asarray(self.cov, dtype=float),
                                           size=n, method="eigh")
        return mean + gen.standard_normal((n, len(mean))) * np.asarray(self.sd, dtype=float)

    def linear_score(self, X) -> np.ndarray:
        return X @ np.asarray(self.coefficients, dtype=float) + self.bias


_COEF = (1.05, -2.35, 0.15)

LINEAR_LARGE_BIAS = GeneratorSpec("linear", _COEF, 8.0, (0.0, 0.0, 0.0),
                                  sd=(1.0, 1.0, 1.0), noise_sd=1.0)
LOGISTIC_INDEPENDENT = GeneratorSpec("logistic", _COEF, -2.0, (0.0, 0.0, 0.0),
                                     sd=(0.5, 0.5, 0.5), noise_sd=0.5)
LOGISTIC_CORRELATED = GeneratorSpec(
    "logistic", _COEF, -2.0, (0.0, 0.0, 0.0),
    cov=((3.17, -1.08, -2.19), (-1.08, 2.23, 1.10), (-2.19, 1.10, 1.63)), noise_sd=0.5)

PRESETS = {
    "linear": LINEAR_LARGE_BIAS,
    "logistic": LOGISTIC_INDEPENDENT,
    "logistic-correlated": LOGISTIC_CORRELATED,
}


def gen_sample(spec: GeneratorSpec, n: int, rng):
    """Noisy sample ``(X, y)`` of size ``n``."""
    if n < 1:
        raise ValueError("sample size must be >= 1")
    gen = as_generator(rng)
    X = spec.features(n, gen)
    score = spec.linear_score(X)
    noise = gen.normal(0.0, spec.noise_sd, size=n) if spec.noise_sd > 0 else 0.0
    if spec.kind == "linear":
        return X, score + noise
    if spec.noise_on == "probability":
        p = np.clip(expit(score) + noise, 0.0, 1.0)
    else:
        p = expit(score + noise)
    return X, (gen.random(n) < p).astype(float)


def gen_test_set(spec: GeneratorSpec, n_test: int, rng):
    """Test features with their noiseless expected targets."""
    if n_test < 1:
        raise ValueError("test size must be >= 1")
    X = spec.features(n_test, as_generator(rng))
    score = spec.linear_score(X)
    return X, (score if spec.kind == "linear" else expit(score))


def _fit_predict(kind, X, y, w, X_test):
    used = w > 0
    X, y, w = X[used], y[used], w[used]
    if kind == "linear":
        A = np.hstack([X, np.ones((X.shape[0], 1))])
        sw = np.sqrt(w)
        coef = np.linalg.lstsq(A * sw[:, None], y * sw, rcond=None)[0]
        return X_test @ coef[:-1] + coef[-1]
    model = fit_logistic(X, y, w, LOGISTIC_L2)
    return expit(X_test @ model.weights + model.bias)


def estimate_bounds(X, y, scheme, n_resamples: int, pct: float, X_test, rng,
                    kind: str = "logistic") -> np.ndarray:
    """Upper bound per test point: the ``pct`` percentile of the predictions
    of ``n_resamples`` models refit under ``scheme``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[0] < 2:
        raise ValueError("need at least two observations")
    labels = None
    if kind == "logistic":
        if not (np.any(y == 1) and np.any(y == 0)):
            raise OneClassData("the sample holds a single class")
        labels = y
    gen = as_generator(rng)
    preds = np.empty((n_resamples, np.shape(X_test)[0]))
    for s in range(n_resamples):
        w = resample_weights(scheme, X.shape[0], gen, y=labels)
        preds[s] = _fit_predict(kind, X, y, w, X_test)
    return percentile(preds, pct, axis=0)


def coverage_proportion(expected, bounds) -> float:
    """Fraction of test points whose expected value is strictly below the bound."""
    return float(np.mean(np.asarray(expected) < np.asarray(bounds)))


@dataclass
class CoverageResult:
    """Mean and standard deviation of the coverage proportion across samples,
    keyed by ``(sample_size, scheme)``."""

    mean: Dict[Tuple[int, WeightScheme], float]
    std: Dict[Tuple[int, WeightScheme], float]
    proportions: Dict[Tuple[int, WeightScheme], np.ndarray]

    def rows(self):
        for (n, scheme) in sorted(self.mean, key=lambda k: (k[0], list(WeightScheme).index(k[1]))):
            yield n, scheme, self.mean[(n, scheme)], self.std[(n, scheme)]

    def to_csv(self, header: Optional[str] = None) -> str:
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample_size", "scheme", "mean_pct", "std_pct"])
        for n, scheme, m, s in self.rows():
            w.writerow([n, scheme.value, f"{100 * m:.4f}", f"{100 * s:.4f}"])
        return buf.getvalue()


def _one_size(spec, n, schemes, n_samples, n_resamples, pct, X_test, expected, seed):
    props = {s: np.empty(n_samples) for s in schemes}
    for i in range(n_samples):
        sample_stream = RngStream(seed, derive_stream_id("sample", n, i))
        gen = sample_stream.generator()
        X, y = gen_sample(spec, n, gen)
        # a tiny logistic sample can come out one-class; redraw it
        while spec.kind == "logistic" and (y.min() == y.max()):
            X, y = gen_sample(spec, n, gen)
        for scheme in schemes:
            bounds = estimate_bounds(X, y, scheme, n_resamples, pct, X_test,
                                     sample_stream.child("scheme", scheme.value), spec.kind)
            props[scheme][i] = coverage_proportion(expected, bounds)
    return n, props


def run_coverage(spec: GeneratorSpec, schemes: Sequence = tuple(WeightScheme),
                 sample_sizes: Sequence[int] = DEFAULT_SAMPLE_SIZES, n_samples: int = 100,
                 n_resamples: int = 10, pct: float = 80.0, n_test: int = 1000,
                 seed: int = 0, jobs: int = 1) -> CoverageResult:
    """Run the coverage study; one test set is shared by every sample."""
    for name, v in (("n_samples", n_samples), ("n_resamples", n_resamples),
                    ("n_test", n_test)):
        if v < 1:
            raise ValueError(f"{name} must be >= 1")
    if not sample_sizes or min(sample_sizes) < 2:
        raise ValueError("sample sizes must be >= 2")
    schemes = [WeightScheme(s) for s in schemes]
    X_test, expected = gen_test_set(spec, n_test, RngStream(seed, derive_stream_id("test")))
    args = [(spec, int(n), schemes, n_samples, n_resamples, pct, X_test, expected, seed)
            for n in sample_sizes]
    if jobs <= 1:
        results = [_one_size(*a) for a in args]
    else:
        with cf.ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_one_size, *zip(*args)))
    mean, std, props = {}, {}, {}
    for n, per_scheme in results:
        for scheme, p in per_scheme.items():
            props[(n, scheme)] = p
            mean[(n, scheme)] = float(p.mean())
            std[(n, scheme)] = float(p.std(ddof=1)) if p.shape[0] > 1 else 0.0
    return CoverageResult(mean, std, props)
