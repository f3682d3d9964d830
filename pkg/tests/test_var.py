import warnings

import numpy as np
import pytest

from conftest import simulate_var
from equicast import errors
from equicast.errors import DegenerateDataWarning
from equicast.var import (
    InfoCriteria,
    VarFit,
    VarSpec,
    build_lag_matrix,
    criteria_from_cov,
    fit_var_ols,
    forecast_var,
    information_criteria,
    select_order,
)

A_PINNED = np.array([[0.5, 0.1], [0.0, 0.3]])


def noiseless_var1(coef, y0, steps):
    data = np.empty((steps, len(y0)))
    data[0] = y0
    for t in range(1, steps):
        data[t] = coef @ data[t - 1]
    return data


class TestBuildLagMatrix:
    def test_scalar_example(self):
        z, y = build_lag_matrix([np.array([1.0, 2.0, 3.0, 4.0])], 1)
        assert z.tolist() == [[1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]
        assert y.tolist() == [[2.0], [3.0], [4.0]]

    def test_dimension_arithmetic(self):
        rng = np.random.default_rng(0)
        series = [rng.standard_normal(10), rng.standard_normal(10)]
        z, y = build_lag_matrix(series, 8)
        assert z.shape == (2, 17)
        assert y.shape == (2, 2)

    def test_lag_ordering(self):
        z, _ = build_lag_matrix([np.arange(1.0, 6.0), np.arange(10.0, 15.0)], 2)
        # row for t=3: [1, y_2', y_1']
        assert z[0].tolist() == [1.0, 2.0, 11.0, 1.0, 10.0]

    def test_order_too_large(self):
        with pytest.raises(errors.OrderTooLarge):
            build_lag_matrix([np.arange(4.0)], 4)

    def test_length_mismatch(self):
        with pytest.raises(errors.LengthMismatch):
            build_lag_matrix([np.arange(4.0), np.arange(5.0)], 1)


class TestFitOls:
    def test_noiseless_recovery_of_pinned_matrix(self):
        data = noiseless_var1(A_PINNED, np.array([1.0, -1.0]), 10)
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        np.testing.assert_allclose(fit.coef[0], A_PINNED, atol=1e-8)
        np.testing.assert_allclose(fit.intercept, 0.0, atol=1e-8)

    def test_residual_orthogonality(self):
        data = simulate_var([A_PINNED], [0.1, -0.2], 500, seed=1)
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        z, y = build_lag_matrix([data[:, 0], data[:, 1]], 1)
        resid = y - z @ np.vstack([fit.intercept, fit.coef[0].T])
        assert np.max(np.abs(z.T @ resid)) < 1e-8

    def test_all_zero_input_returns_zero_fit(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            with pytest.raises(DegenerateDataWarning):
                fit_var_ols([np.zeros(30), np.zeros(30)], VarSpec(2, 2))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fit = fit_var_ols([np.zeros(30), np.zeros(30)], VarSpec(2, 2))
        assert any(issubclass(w.category, DegenerateDataWarning) for w in caught)
        np.testing.assert_array_equal(fit.intercept, 0.0)
        np.testing.assert_array_equal(fit.coef, 0.0)

    def test_singular_design_raises(self):
        # constant nonzero data: the lag column duplicates the intercept
        with pytest.raises(errors.SingularDesign):
            fit_var_ols([np.full(30, 2.0)], VarSpec(1, 1))

    def test_univariate_matches_scalar_normal_equations(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(400)
        fit = fit_var_ols([x], VarSpec(1, 4))
        z, y = build_lag_matrix([x], 4)
        beta = np.linalg.solve(z.T @ z, z.T @ y).ravel()
        assert abs(fit.intercept[0] - beta[0]) < 1e-10
        for lag in range(4):
            assert abs(fit.coef[lag][0, 0] - beta[1 + lag]) < 1e-10

    def test_bundled_sample_order_8(self, sp500_sample, spdr_sample):
        from equicast.timeseries import SplitSpec, load_csv, log_returns, split

        r1 = log_returns(load_csv(sp500_sample, "adj_close"))
        r2 = log_returns(load_csv(spdr_sample, "adj_close"))
        t1, _ = split(r1, SplitSpec(2638, 192))
        t2, _ = split(r2, SplitSpec(2638, 192))
        fit = fit_var_ols([t1.values, t2.values], VarSpec(2, 8))
        assert fit.nobs == 2638 - 8
        for value in (fit.criteria.aic, fit.criteria.bic, fit.criteria.fpe):
            assert np.isfinite(value)

    def test_resid_cov_symmetric_psd(self):
        data = simulate_var([A_PINNED], [0.0, 0.0], 300, seed=5)
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        np.testing.assert_allclose(fit.resid_cov, fit.resid_cov.T)
        assert np.all(np.linalg.eigvalsh(fit.resid_cov) >= -1e-12)


class TestInformationCriteria:
    def test_scalar_formula_oracle(self):
        c = criteria_from_cov(np.array([[1.0]]), 100, 1, 1)
        assert c.aic == pytest.approx(0.04)
        assert c.bic == pytest.approx(2 * np.log(100) / 100)
        assert c.hqic == pytest.approx(2 * 2 * np.log(np.log(100)) / 100)
        assert c.fpe == pytest.approx((102 / 98) ** 1)
        assert c.log_likelihood == pytest.approx(
            -(100 / 2) * np.log(2 * np.pi) - 50.0
        )

    def test_unit_determinant_reduces_to_penalties(self):
        cov = np.diag([2.0, 0.5])  # determinant exactly 1
        c = criteria_from_cov(cov, 200, 2, 3)
        m = 2 * 3 + 1
        assert c.aic == pytest.approx(2 * m * 2 / 200)
        assert c.fpe == pytest.approx(((200 + m) / (200 - m)) ** 2)

    def test_recompute_from_fit(self):
        data = simulate_var([A_PINNED], [0.0, 0.0], 400, seed=2)
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        again = information_criteria(fit)
        assert again == fit.criteria

    def test_series_reordering_invariance(self):
        data = simulate_var([A_PINNED], [0.1, 0.2], 600, seed=9)
        a = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 2)).criteria
        b = fit_var_ols([data[:, 1], data[:, 0]], VarSpec(2, 2)).criteria
        assert a.aic == pytest.approx(b.aic, rel=1e-10)
        assert a.bic == pytest.approx(b.bic, rel=1e-10)
        assert a.hqic == pytest.approx(b.hqic, rel=1e-10)

    def test_singular_covariance(self):
        with pytest.raises(errors.SingularCovariance):
            criteria_from_cov(np.zeros((2, 2)), 100, 2, 1)


class TestSelectOrder:
    def test_recovers_var2(self):
        a1 = np.array([[0.4, 0.1], [0.05, 0.3]])
        a2 = np.array([[0.2, -0.1], [0.1, 0.15]])
        hits = 0
        for seed in range(5):
            data = simulate_var([a1, a2], [0.0, 0.0], 4000, seed=3000 + seed)
            sel = select_order([data[:, 0], data[:, 1]], 6)
            hits += sel.selected == 2
        assert hits >= 4

    def test_white_noise_picks_one(self):
        rng = np.random.default_rng(12)
        data = rng.standard_normal((3000, 2))
        sel = select_order([data[:, 0], data[:, 1]], 6)
        assert sel.selected == 1
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        assert np.max(np.abs(fit.coef)) < 0.07

    def test_table_covers_requested_range(self, sp500_sample, spdr_sample):
        from equicast.timeseries import SplitSpec, load_csv, log_returns, split

        r1 = log_returns(load_csv(sp500_sample, "adj_close"))
        r2 = log_returns(load_csv(spdr_sample, "adj_close"))
        t1, _ = split(r1, SplitSpec(2638, 192))
        t2, _ = split(r2, SplitSpec(2638, 192))
        sel = select_order([t1.values, t2.values], 12)
        assert [row[0] for row in sel.table] == list(range(1, 13))
        assert isinstance(sel.table[7][1], InfoCriteria)  # p=8 present

    def test_common_effective_sample(self):
        # every candidate conditions on the first max_p observations, so a
        # direct fit on the trimmed data must reproduce the table row
        data = simulate_var([A_PINNED], [0.0, 0.0], 200, seed=4)
        max_p = 5
        sel = select_order([data[:, 0], data[:, 1]], max_p)
        for order, crit in sel.table:
            trimmed = data[max_p - order :]
            direct = fit_var_ols([trimmed[:, 0], trimmed[:, 1]], VarSpec(2, order))
            assert direct.nobs == 200 - max_p
            assert crit.aic == pytest.approx(direct.criteria.aic, rel=1e-12)

    def test_max_p_bound(self):
        with pytest.raises(errors.OrderTooLarge):
            select_order([np.arange(30.0), np.arange(30.0)], 10)


class TestForecast:
    def test_zero_coefficients_flat_intercept(self):
        fit = VarFit(VarSpec(2, 1), np.array([0.5, -0.2]),
                     np.zeros((1, 2, 2)), np.eye(2), 100,
                     criteria_from_cov(np.eye(2), 100, 2, 1))
        fc = forecast_var(fit, np.array([[3.0, 4.0]]), 5)
        np.testing.assert_allclose(fc, np.tile([0.5, -0.2], (5, 1)))

    def test_horizon_one_matches_hand_evaluation(self):
        data = simulate_var([A_PINNED], [0.1, 0.2], 500, seed=8)
        fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
        recent = data[-1:]
        fc = forecast_var(fit, recent, 1)
        hand = fit.intercept + fit.coef[0] @ data[-1]
        np.testing.assert_allclose(fc[0], hand, rtol=1e-12)

    def test_stable_var_converges_to_steady_state(self):
        intercept = np.array([1.0, 0.5])
        fit = VarFit(VarSpec(2, 1), intercept, A_PINNED[None], np.eye(2), 100,
                     criteria_from_cov(np.eye(2), 100, 2, 1))
        fc = forecast_var(fit, np.zeros((1, 2)), 400)
        steady = np.linalg.solve(np.eye(2) - A_PINNED, intercept)
        np.testing.assert_allclose(fc[-1], steady, rtol=1e-10)

    def test_shape_mismatch(self):
        fit = VarFit(VarSpec(2, 2), np.zeros(2), np.zeros((2, 2, 2)), np.eye(2), 50,
                     criteria_from_cov(np.eye(2), 50, 2, 2))
        with pytest.raises(errors.ShapeMismatch):
            forecast_var(fit, np.zeros((1, 2)), 5)
        with pytest.raises(errors.ShapeMismatch):
            forecast_var(fit, np.zeros((2, 2)), 0)


def test_serialization_round_trip():
    data = simulate_var([A_PINNED], [0.05, -0.05], 300, seed=6)
    fit = fit_var_ols([data[:, 0], data[:, 1]], VarSpec(2, 1))
    back = VarFit.from_dict(fit.to_dict())
    np.testing.assert_allclose(back.coef, fit.coef)
    np.testing.assert_allclose(back.intercept, fit.intercept)
    np.testing.assert_allclose(back.resid_cov, fit.resid_cov)
    assert back.criteria == fit.criteria
    assert back.nobs == fit.nobs
