"""The two forecasting architectures: a stacked-LSTM window model and a
small 3D-CNN over return cubes.

Both train on standardized values (training statistics only), minimize MSE
with Adam, and are bitwise reproducible for a fixed config seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import BadDims, DivergedTraining, NonFiniteGradient, SeriesTooShort, ShapeMismatch
from .layers import Conv3d, Dense, Dropout, Flatten, Lstm, MaxPool3d
from .network import AdamState, Network, adam_step, backprop, load_network, save_network

LSTM_UNITS = 50
CNN_FILTERS = (8, 16)
CNN_DENSE = 32
CNN_DROPOUT = 0.2


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    window: int = 30
    batch_size: int = 32
    seed: int = 0
    lr: float = 1e-3

    def __post_init__(self):
        if self.window < 1 or self.epochs < 1 or self.batch_size < 1:
            raise BadDims(f"invalid training config {self}")


def _values(x) -> np.ndarray:
    v = getattr(x, "values", x)
    return np.asarray(v, dtype=np.float64).ravel()


@dataclass
class SequenceModel:
    """A trained window-to-next-value predictor with its input scaler."""

    kind: str                  # "lstm" | "cnn3d"
    net: Network
    window: int
    mean: float
    std: float
    config: TrainConfig
    dims: tuple | None = None  # cnn3d only
    loss_history: list = field(default_factory=list)

    def _prepare(self, windows: np.ndarray) -> np.ndarray:
        """Standardize raw window rows and shape them for the network."""
        z = (windows - self.mean) / self.std
        if self.kind == "lstm":
            return z[:, :, None]
        cubes, _ = tensorize_windows(z, self.dims)
        return cubes

    def predict_next(self, window_values) -> float:
        w = np.asarray(window_values, dtype=np.float64).ravel()
        if w.size != self.window:
            raise ShapeMismatch(f"model window is {self.window}, got {w.size} values")
        out = self.net.forward(self._prepare(w[None, :]))
        return float(out[0, 0] * self.std + self.mean)

    def predict_batch(self, windows) -> np.ndarray:
        """One-step predictions for many raw windows at once (rows)."""
        w = np.asarray(windows, dtype=np.float64)
        if w.ndim != 2 or w.shape[1] != self.window:
            raise ShapeMismatch(f"expected (N, {self.window}) windows, got {w.shape}")
        out = self.net.forward(self._prepare(w))
        return out[:, 0] * self.std + self.mean

    def save(self, path):
        header = {
            "kind": self.kind,
            "window": self.window,
            "mean": self.mean,
            "std": self.std,
            "dims": list(self.dims) if self.dims else None,
            "config": {
                "epochs": self.config.epochs,
                "window": self.config.window,
                "batch_size": self.config.batch_size,
                "seed": self.config.seed,
                "lr": self.config.lr,
            },
            "final_loss": self.loss_history[-1] if self.loss_history else None,
        }
        save_network(self.net, path, header)

    @classmethod
    def load(cls, path) -> "SequenceModel":
        net, header = load_network(path)
        cfg = TrainConfig(**header["config"])
        dims = tuple(header["dims"]) if header.get("dims") else None
        return cls(kind=header["kind"], net=net, window=header["window"],
                   mean=header["mean"], std=header["std"], config=cfg, dims=dims)


def _windows_and_targets(values: np.ndarray, window: int):
    n = values.size
    count = n - window
    idx = np.arange(window)[None, :] + np.arange(count)[:, None]
    return values[idx], values[window:]


def _train(net: Network, inputs: np.ndarray, targets: np.ndarray,
           cfg: TrainConfig, rng: np.random.Generator) -> list:
    state = AdamState.for_params(net.params, lr=cfg.lr)
    n = inputs.shape[0]
    losses = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            try:
                loss, grads = backprop(net, inputs[batch], targets[batch], training=True)
            except NonFiniteGradient as exc:
                raise DivergedTraining(str(exc)) from exc
            if not np.isfinite(loss):
                raise DivergedTraining(f"loss became {loss}")
            adam_step(state, net.params, grads)
            epoch_loss += loss * batch.size
        losses.append(epoch_loss / n)
    return losses


def fit_lstm_window_model(train, cfg: TrainConfig) -> SequenceModel:
    """Train the stacked LSTM(50) -> LSTM(50) -> Dense(1) window model.

    Inputs are standardized with training mean/std only; a constant series
    keeps std pinned at 1 so the standardized problem is all zeros.
    """
    values = _values(train)
    if values.size <= cfg.window + 1:
        raise SeriesTooShort(f"need more than window + 1 = {cfg.window + 1} values")
    mean = float(np.mean(values))
    std = float(np.std(values))
    if std == 0.0:
        std = 1.0

    rng = np.random.default_rng(cfg.seed)
    net = Network([
        Lstm(1, LSTM_UNITS, return_sequences=True, rng=rng),
        Lstm(LSTM_UNITS, LSTM_UNITS, return_sequences=False, rng=rng),
        Dense(LSTM_UNITS, 1, rng=rng),
    ])
    z = (values - mean) / std
    windows, targets = _windows_and_targets(z, cfg.window)
    losses = _train(net, windows[:, :, None], targets[:, None], cfg, rng)
    return SequenceModel(kind="lstm", net=net, window=cfg.window, mean=mean,
                         std=std, config=cfg, loss_history=losses)


def predict_recursive(model: SequenceModel, seed_window, horizon: int) -> np.ndarray:
    """Slide the model forward ``horizon`` steps on its own predictions."""
    w = np.asarray(seed_window, dtype=np.float64).ravel()
    if w.size != model.window:
        raise ShapeMismatch(f"seed window must have {model.window} values, got {w.size}")
    if horizon < 1:
        raise ShapeMismatch(f"horizon must be >= 1, got {horizon}")
    buf = w.copy()
    out = np.empty(horizon)
    for k in range(horizon):
        nxt = model.predict_next(buf)
        out[k] = nxt
        buf[:-1] = buf[1:]
        buf[-1] = nxt
    return out


def tensorize_windows(windows: np.ndarray, dims):
    """Write each window row-major into an h*w*d cube, zero-padding the rest.

    Returns (cubes (N, h, w, d, 1), n_padded_cells).
    """
    h, w, d = dims
    count, window = windows.shape
    cells = h * w * d
    if cells < window:
        raise BadDims(f"dims {dims} hold {cells} cells, window needs {window}")
    flat = np.zeros((count, cells))
    flat[:, :window] = windows
    return flat.reshape(count, h, w, d, 1), cells - window


def tensorize_returns_3d(returns, window: int, dims):
    """Rolling return windows folded into 3D cubes with next-value targets."""
    values = _values(returns)
    if len(dims) != 3 or any(int(s) < 1 for s in dims):
        raise BadDims(f"dims must be three positive sizes, got {dims}")
    if window > values.size - 1:
        raise SeriesTooShort(f"window {window} needs at least {window + 1} values")
    windows, targets = _windows_and_targets(values, window)
    cubes, _ = tensorize_windows(windows, dims)
    return cubes, targets


def fit_cnn3d(train, cfg: TrainConfig, dims) -> SequenceModel:
    """Train the two-stage 3D-CNN regressor on return cubes.

    Architecture: Conv3d(8) -> MaxPool(2) -> Conv3d(16) -> Flatten ->
    Dense(32, relu) -> Dropout(0.2) -> Dense(1), all with same padding
    and relu after each convolution.
    """
    dims = tuple(int(s) for s in dims)
    if len(dims) != 3 or min(dims) < 2:
        raise BadDims(f"each dim must be >= 2 for the conv+pool stage, got {dims}")
    values = _values(train)
    if values.size <= cfg.window + 1:
        raise SeriesTooShort(f"need more than window + 1 = {cfg.window + 1} values")
    mean = float(np.mean(values))
    std = float(np.std(values))
    if std == 0.0:
        std = 1.0

    pooled = tuple(s // 2 for s in dims)
    flat_dim = pooled[0] * pooled[1] * pooled[2] * CNN_FILTERS[1]
    rng = np.random.default_rng(cfg.seed)
    net = Network([
        Conv3d(1, CNN_FILTERS[0], rng=rng),
        MaxPool3d(),
        Conv3d(CNN_FILTERS[0], CNN_FILTERS[1], rng=rng),
        Flatten(),
        Dense(flat_dim, CNN_DENSE, activation="relu", rng=rng),
        Dropout(CNN_DROPOUT, rng=rng),
        Dense(CNN_DENSE, 1, rng=rng),
    ])
    z = (values - mean) / std
    cubes, targets = tensorize_returns_3d(z, cfg.window, dims)
    losses = _train(net, cubes, targets[:, None], cfg, rng)
    return SequenceModel(kind="cnn3d", net=net, window=cfg.window, mean=mean,
                         std=std, config=cfg, dims=dims, loss_history=losses)
