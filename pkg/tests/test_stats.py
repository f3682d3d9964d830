import math

import numpy as np
import pytest

from equicast import errors
from equicast.stats import (
    acf,
    adf_critical_values,
    adf_test,
    describe,
    pacf,
    pearson,
)
from equicast.timeseries import load_csv, log_returns, split, SplitSpec


def ar1(phi, n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + rng.standard_normal() * scale
    return x


class TestDescribe:
    def test_two_point_oracle(self):
        d = describe([-1.0, 1.0])
        assert d.mean == 0.0
        assert d.std_dev == pytest.approx(math.sqrt(2.0))
        assert d.variance == pytest.approx(2.0)
        assert d.min == -1.0 and d.max == 1.0

    def test_constant_series_degenerate(self):
        d = describe([1.0, 1.0, 1.0, 1.0])
        assert d.mean == 1.0
        assert d.variance == 0.0
        assert d.degenerate_variance
        assert math.isnan(d.skewness) and math.isnan(d.kurtosis)

    def test_normal_sample_moments(self):
        x = np.random.default_rng(0).standard_normal(200000)
        d = describe(x)
        assert abs(d.skewness) < 0.02
        assert abs(d.kurtosis) < 0.05  # excess kurtosis of a normal is 0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(50)
        a = describe(x)
        b = describe(rng.permutation(x))
        for field in ("mean", "median", "std_dev", "variance", "min", "max",
                      "kurtosis", "skewness"):
            assert getattr(a, field) == pytest.approx(getattr(b, field), rel=1e-12)

    def test_variance_is_squared_std(self):
        x = np.random.default_rng(9).uniform(0, 5, 37)
        d = describe(x)
        assert d.variance == pytest.approx(d.std_dev**2, rel=1e-14)
        assert d.min <= d.median <= d.max

    def test_too_short(self):
        with pytest.raises(errors.SeriesTooShort):
            describe([1.0])

    def test_bundled_sample_frozen_values(self, sp500_sample):
        r = log_returns(load_csv(sp500_sample, "adj_close"))
        d = describe(r)
        assert d.mean == pytest.approx(0.000329, abs=2e-5)
        assert d.std_dev == pytest.approx(0.00983, abs=2e-4)


class TestAcf:
    def test_white_noise_stays_in_band(self):
        x = np.random.default_rng(42).standard_normal(5000)
        points = acf(x, 10)
        bound = 3.0 / math.sqrt(5000)
        assert all(abs(p.value) < bound for p in points)
        assert all(p.confidence_band == pytest.approx(1.96 / math.sqrt(5000)) for p in points)

    def test_alternating_series(self):
        x = np.array([(-1.0) ** t for t in range(200)])
        assert acf(x, 1)[0].value == pytest.approx(-1.0, abs=0.01)

    def test_ar1_matches_analytic_decay(self):
        x = ar1(0.8, 10000, seed=8)
        points = acf(x, 10)
        for k, p in enumerate(points, start=1):
            assert p.value == pytest.approx(0.8**k, abs=0.05)

    def test_values_bounded_by_one(self):
        x = np.random.default_rng(1).uniform(-1, 1, 100)
        assert all(abs(p.value) <= 1.0 for p in acf(x, 20))

    def test_lag_too_large(self):
        with pytest.raises(errors.LagTooLarge):
            acf(np.arange(10.0), 5)


class TestPacf:
    def test_ar1_cutoff(self):
        x = ar1(0.8, 10000, seed=8)
        points = pacf(x, 10)
        assert points[0].value == pytest.approx(0.8, abs=0.05)
        assert all(abs(p.value) < 0.05 for p in points[1:])

    def test_white_noise_in_band(self):
        x = np.random.default_rng(42).standard_normal(5000)
        points = pacf(x, 10)
        in_band = sum(abs(p.value) <= p.confidence_band for p in points)
        assert in_band >= 9

    def test_first_lag_equals_acf(self):
        x = np.random.default_rng(7).standard_normal(400)
        assert pacf(x, 5)[0].value == acf(x, 5)[0].value


class TestAdf:
    def test_random_walk_keeps_unit_root(self):
        # seed picked to be representative: a unit-root process is still
        # falsely rejected at the nominal 5% rate, covered by the batch test
        rw = np.cumsum(np.random.default_rng(8).standard_normal(2000))
        assert not adf_test(rw, 10).is_stationary

    def test_rejection_rates_over_seed_batch(self):
        rejected_rw = sum(
            adf_test(np.cumsum(np.random.default_rng(1000 + s).standard_normal(1000))).is_stationary
            for s in range(20)
        )
        rejected_wn = sum(
            adf_test(np.random.default_rng(2000 + s).standard_normal(1000)).is_stationary
            for s in range(20)
        )
        assert rejected_rw <= 3
        assert rejected_wn == 20

    def test_white_noise_rejects(self):
        wn = np.random.default_rng(7).standard_normal(2000)
        result = adf_test(wn, 10)
        assert result.is_stationary
        assert result.t_statistic < -20.0

    def test_bundled_sample_returns_stationary(self, sp500_sample):
        prices = load_csv(sp500_sample, "adj_close")
        train, _ = split(log_returns(prices), SplitSpec(2638, 192))
        assert adf_test(train).is_stationary

    def test_decision_matches_critical_value(self):
        wn = np.random.default_rng(3).standard_normal(500)
        result = adf_test(wn, 5)
        assert result.is_stationary == (result.t_statistic < result.critical_values["5%"])

    def test_affine_scale_invariance(self):
        x = np.random.default_rng(11).standard_normal(800)
        a = adf_test(x, 6)
        b = adf_test(5.0 + 3.0 * x, 6)
        assert a.t_statistic == pytest.approx(b.t_statistic, rel=1e-9)
        assert a.is_stationary == b.is_stationary

    def test_schwert_default_lag_bound(self):
        x = np.random.default_rng(2).standard_normal(400)
        result = adf_test(x)  # max_lag 0 applies the Schwert rule
        assert 0 <= result.lags_used <= int(12 * (400 / 100) ** 0.25)

    def test_too_short(self):
        with pytest.raises(errors.SeriesTooShort):
            adf_test(np.arange(12.0), 10)

    def test_critical_value_interpolation(self):
        cv_small = adf_critical_values(25)
        cv_large = adf_critical_values(10**9)
        assert cv_small["5%"] == pytest.approx(-3.00, abs=1e-9)
        assert cv_large["5%"] == pytest.approx(-2.86, abs=1e-3)
        mid = adf_critical_values(50)["5%"]
        assert -3.00 < mid < -2.86


class TestPearson:
    def test_identity(self):
        x = np.arange(10.0)
        assert pearson(x, x) == pytest.approx(1.0)

    def test_sign_flip(self):
        x = np.arange(10.0)
        assert pearson(x, -x) == pytest.approx(-1.0)

    def test_symmetry_and_affine_invariance(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(60)
        y = rng.standard_normal(60)
        assert pearson(x, y) == pytest.approx(pearson(y, x), rel=1e-14)
        assert pearson(2.0 + 3.0 * x, y) == pytest.approx(pearson(x, y), rel=1e-12)

    def test_bundled_pair_highly_correlated(self, sp500_sample, spdr_sample):
        p1 = load_csv(sp500_sample, "adj_close")
        p2 = load_csv(spdr_sample, "adj_close")
        assert pearson(p1, p2) > 0.95
        assert pearson(log_returns(p1), log_returns(p2)) > 0.9

    def test_errors(self):
        with pytest.raises(errors.LengthMismatch):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(errors.DegenerateVariance):
            pearson([1.0, 1.0], [1.0, 2.0])
