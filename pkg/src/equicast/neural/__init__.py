"""Small deterministic float64 network engine and the two forecast models."""

from .layers import Conv3d, Dense, Dropout, Flatten, Lstm, MaxPool3d, lstm_forward
from .network import (
    AdamState,
    Network,
    adam_step,
    backprop,
    load_network,
    mse,
    save_network,
)
from .models import (
    SequenceModel,
    TrainConfig,
    fit_cnn3d,
    fit_lstm_window_model,
    predict_recursive,
    tensorize_returns_3d,
    tensorize_windows,
)

__all__ = [
    "AdamState",
    "Conv3d",
    "Dense",
    "Dropout",
    "Flatten",
    "Lstm",
    "MaxPool3d",
    "Network",
    "SequenceModel",
    "TrainConfig",
    "adam_step",
    "backprop",
    "fit_cnn3d",
    "fit_lstm_window_model",
    "load_network",
    "lstm_forward",
    "mse",
    "predict_recursive",
    "save_network",
    "tensorize_returns_3d",
    "tensorize_windows",
]
