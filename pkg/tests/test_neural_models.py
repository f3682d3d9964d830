import numpy as np
import pytest

from equicast import errors
from equicast.neural import (
    SequenceModel,
    TrainConfig,
    fit_cnn3d,
    fit_lstm_window_model,
    predict_recursive,
    tensorize_returns_3d,
)


class TestTensorize:
    def test_exact_cube_fill(self):
        values = np.arange(1.0, 30.0)  # 29 values -> 2 windows of 27
        cubes, targets = tensorize_returns_3d(values, 27, (3, 3, 3))
        assert cubes.shape == (2, 3, 3, 3, 1)
        np.testing.assert_array_equal(cubes[0].ravel(), values[:27])
        np.testing.assert_array_equal(targets, values[27:])

    def test_padding_cells_are_zero(self):
        values = np.arange(1.0, 10.0)  # window 8 into 12 cells
        cubes, _ = tensorize_returns_3d(values, 8, (2, 2, 3))
        flat = cubes[0].ravel()
        np.testing.assert_array_equal(flat[:8], values[:8])
        np.testing.assert_array_equal(flat[8:], 0.0)

    def test_zero_returns_zero_tensors(self):
        cubes, targets = tensorize_returns_3d(np.zeros(20), 8, (2, 2, 2))
        np.testing.assert_array_equal(cubes, 0.0)
        np.testing.assert_array_equal(targets, 0.0)

    def test_dims_too_small(self):
        with pytest.raises(errors.BadDims):
            tensorize_returns_3d(np.arange(30.0), 10, (2, 2, 2))

    def test_window_exceeds_series(self):
        with pytest.raises(errors.SeriesTooShort):
            tensorize_returns_3d(np.arange(5.0), 5, (2, 2, 2))


class TestLstmWindowModel:
    def test_constant_series_predicts_constant(self):
        series = np.full(80, 42.0)
        model = fit_lstm_window_model(series, TrainConfig(epochs=2, window=10, seed=0))
        pred = model.predict_next(series[:10])
        assert abs(pred - 42.0) < 1e-3

    def test_bitwise_deterministic(self):
        rng = np.random.default_rng(0)
        series = 100 + np.cumsum(rng.standard_normal(120))
        cfg = TrainConfig(epochs=3, window=15, seed=9)
        a = fit_lstm_window_model(series, cfg)
        b = fit_lstm_window_model(series, cfg)
        for pa, pb in zip(a.net.params, b.net.params):
            np.testing.assert_array_equal(pa, pb)

    def test_loss_history_length(self):
        series = np.sin(np.arange(100) / 5.0)
        model = fit_lstm_window_model(series, TrainConfig(epochs=4, window=10, seed=1))
        assert len(model.loss_history) == 4
        assert all(np.isfinite(l) for l in model.loss_history)

    def test_too_short(self):
        with pytest.raises(errors.SeriesTooShort):
            fit_lstm_window_model(np.arange(10.0), TrainConfig(epochs=1, window=10))

    def test_diverged_training(self):
        # Adam caps each step near lr, so the rate must be absurd enough
        # for the squared error to overflow float64
        series = np.sin(np.arange(120) / 3.0)
        with pytest.raises(errors.DivergedTraining):
            fit_lstm_window_model(series, TrainConfig(epochs=15, window=10, seed=0, lr=1e200))


class TestPredictRecursive:
    def setup_method(self):
        series = np.sin(np.arange(90) / 6.0)
        self.series = series
        self.model = fit_lstm_window_model(series, TrainConfig(epochs=2, window=12, seed=2))

    def test_horizon_one_is_single_forward_pass(self):
        window = self.series[-12:]
        path = predict_recursive(self.model, window, 1)
        assert path.shape == (1,)
        assert path[0] == self.model.predict_next(window)

    def test_constant_model_constant_path(self):
        series = np.full(60, 7.0)
        model = fit_lstm_window_model(series, TrainConfig(epochs=2, window=8, seed=3))
        path = predict_recursive(model, series[:8], 20)
        np.testing.assert_allclose(path, path[0], atol=1e-9)

    def test_window_size_enforced(self):
        with pytest.raises(errors.ShapeMismatch):
            predict_recursive(self.model, self.series[-5:], 3)
        with pytest.raises(errors.ShapeMismatch):
            predict_recursive(self.model, self.series[-12:], 0)

    def test_feeds_predictions_back(self):
        # two-step recursion must use the first prediction in the window
        window = self.series[-12:]
        path = predict_recursive(self.model, window, 2)
        slid = np.concatenate([window[1:], [path[0]]])
        assert path[1] == self.model.predict_next(slid)


class TestCnn3d:
    def test_all_zero_input_zero_loss(self):
        model = fit_cnn3d(np.zeros(40), TrainConfig(epochs=2, window=8, seed=0), (2, 2, 2))
        assert model.loss_history[-1] < 1e-10

    def test_learns_noiseless_signal(self):
        # spec-style learnability: sine returns, dims (4,4,4), window 64
        rets = np.sin(np.arange(400) / 7.0) * 0.01
        model = fit_cnn3d(rets, TrainConfig(epochs=100, window=64, seed=2), (4, 4, 4))
        assert model.loss_history[-1] < 0.5 * model.loss_history[0]

    def test_bitwise_deterministic(self):
        rets = np.random.default_rng(1).standard_normal(60) * 0.01
        cfg = TrainConfig(epochs=2, window=8, seed=5)
        a = fit_cnn3d(rets, cfg, (2, 2, 2))
        b = fit_cnn3d(rets, cfg, (2, 2, 2))
        for pa, pb in zip(a.net.params, b.net.params):
            np.testing.assert_array_equal(pa, pb)

    def test_dims_must_survive_pooling(self):
        with pytest.raises(errors.BadDims):
            fit_cnn3d(np.arange(40.0), TrainConfig(epochs=1, window=4), (1, 2, 2))

    def test_recursive_forecast_shape(self):
        rets = np.random.default_rng(2).standard_normal(60) * 0.01
        model = fit_cnn3d(rets, TrainConfig(epochs=2, window=8, seed=6), (2, 2, 2))
        path = predict_recursive(model, rets[-8:], 12)
        assert path.shape == (12,)
        assert np.all(np.isfinite(path))


class TestModelSerialization:
    def test_lstm_round_trip(self, tmp_path):
        series = np.sin(np.arange(80) / 4.0) + 3.0
        model = fit_lstm_window_model(series, TrainConfig(epochs=2, window=10, seed=4))
        path = tmp_path / "lstm.ckpt"
        model.save(path)
        loaded = SequenceModel.load(path)
        assert loaded.kind == "lstm"
        assert loaded.window == 10
        assert loaded.mean == model.mean and loaded.std == model.std
        window = series[-10:]
        assert loaded.predict_next(window) == model.predict_next(window)

    def test_cnn_round_trip(self, tmp_path):
        rets = np.random.default_rng(3).standard_normal(50) * 0.01
        model = fit_cnn3d(rets, TrainConfig(epochs=2, window=8, seed=7), (2, 2, 2))
        path = tmp_path / "cnn.ckpt"
        model.save(path)
        loaded = SequenceModel.load(path)
        assert loaded.kind == "cnn3d"
        assert loaded.dims == (2, 2, 2)
        window = rets[-8:]
        assert loaded.predict_next(window) == model.predict_next(window)
