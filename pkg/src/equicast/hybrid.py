"""Confidence-weighted combination of GARCH and LSTM forecasts.

Weights come from inverse validation RMSE, so the more accurate component
dominates and a perfect component takes the full weight.  The combined
path is a convex combination; the GARCH volatility path rides along for
risk context but never enters the point forecast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch


@dataclass(frozen=True)
class ConfidenceWeights:
    w_garch: float
    w_lstm: float

    def __post_init__(self):
        if self.w_garch < 0 or self.w_lstm < 0:
            raise LengthMismatch("weights must be nonnegative")
        if abs(self.w_garch + self.w_lstm - 1.0) > 1e-9:
            raise LengthMismatch("weights must sum to 1")


@dataclass(frozen=True)
class HybridForecast:
    combined: np.ndarray
    garch_path: np.ndarray
    lstm_path: np.ndarray
    weights: ConfidenceWeights
    volatility: np.ndarray | None = None


def _path(x) -> np.ndarray:
    v = getattr(x, "values", x)
    return np.asarray(v, dtype=np.float64).ravel()


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def compute_weights(validation_actuals, garch_path, lstm_path) -> ConfidenceWeights:
    """Inverse-RMSE weights on a validation slice, normalized to sum 1.

    Equal errors give an even split; a zero-error component gets weight 1.
    """
    actual = _path(validation_actuals)
    g = _path(garch_path)
    l = _path(lstm_path)
    if not (actual.size == g.size == l.size):
        raise LengthMismatch(
            f"paths differ in length: actuals {actual.size}, garch {g.size}, lstm {l.size}"
        )
    if actual.size < 2:
        raise LengthMismatch("need at least 2 validation points")
    rmse_g = _rmse(g, actual)
    rmse_l = _rmse(l, actual)
    if rmse_g == 0.0 and rmse_l == 0.0:
        return ConfidenceWeights(0.5, 0.5)
    if rmse_g == 0.0:
        return ConfidenceWeights(1.0, 0.0)
    if rmse_l == 0.0:
        return ConfidenceWeights(0.0, 1.0)
    inv_g, inv_l = 1.0 / rmse_g, 1.0 / rmse_l
    total = inv_g + inv_l
    return ConfidenceWeights(inv_g / total, inv_l / total)


def combine(garch_path, lstm_path, weights: ConfidenceWeights,
            volatility=None) -> HybridForecast:
    """Element-wise weighted average of the two forecast paths."""
    g = _path(garch_path)
    l = _path(lstm_path)
    if g.size != l.size:
        raise LengthMismatch(f"paths differ in length: {g.size} vs {l.size}")
    combined = weights.w_garch * g + weights.w_lstm * l
    vol = None if volatility is None else _path(volatility)
    return HybridForecast(combined=combined, garch_path=g, lstm_path=l,
                          weights=weights, volatility=vol)
