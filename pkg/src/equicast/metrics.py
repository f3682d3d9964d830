"""Forecast scoring: seven error metrics plus Theil's U2 against the naive benchmark.

Sign convention is forecast minus actual throughout.  MAPE and MPE are
reported as fractions, not percentages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateVariance, LengthMismatch, ZeroActual, ZeroDenominator

THEIL_EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class MetricsTable:
    """Error metrics for one (model, target) pair."""

    mape: float
    me: float
    mae: float
    mpe: float
    rmse: float
    correlation: float
    minmax: float
    n: int
    target_kind: str = "price"


@dataclass(frozen=True)
class TheilVerdict:
    """U2 statistic with its three-way decision against the naive forecast."""

    u2: float
    verdict: str  # "worse" | "equal" | "better"


def _paths(actual, forecast):
    y = np.asarray(actual, dtype=np.float64).ravel()
    f = np.asarray(forecast, dtype=np.float64).ravel()
    if y.shape != f.shape:
        raise LengthMismatch(f"actual has {y.size} points, forecast has {f.size}")
    return y, f


def error_metrics(actual, forecast, target_kind: str = "price") -> MetricsTable:
    """Score a forecast path against actuals.

    ME, MAE, RMSE are in the target's units; MPE and MAPE are fractions
    relative to the actual value, so every actual must be nonzero.
    MinMax is 1 - mean(min(y, f)/max(y, f)) over pairs where both values
    are positive (a symmetric relative accuracy).
    """
    y, f = _paths(actual, forecast)
    if y.size < 2:
        raise LengthMismatch("need at least 2 points to score")
    if np.any(y == 0.0):
        raise ZeroActual("percentage metrics undefined: actual path contains zeros")

    err = f - y
    me = float(np.mean(err))
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err**2)))
    mpe = float(np.mean(err / y))
    mape = float(np.mean(np.abs(err) / np.abs(y)))

    if np.min(y) == np.max(y) or np.min(f) == np.max(f):
        raise DegenerateVariance("correlation undefined for a constant path")
    sy = y - y.mean()
    sf = f - f.mean()
    denom = np.sqrt(np.sum(sy**2) * np.sum(sf**2))
    correlation = float(np.sum(sy * sf) / denom)

    pos = (y > 0) & (f > 0)
    if not np.any(pos):
        minmax = float("nan")
    else:
        lo = np.minimum(y[pos], f[pos])
        hi = np.maximum(y[pos], f[pos])
        minmax = float(1.0 - np.mean(lo / hi))

    return MetricsTable(
        mape=mape, me=me, mae=mae, mpe=mpe, rmse=rmse,
        correlation=correlation, minmax=minmax,
        n=int(y.size), target_kind=target_kind,
    )


def theil_u2(actual, forecast) -> TheilVerdict:
    """Theil's U2 on a forecast path.

    ``actual`` must include the value preceding the scored range, so
    len(actual) = len(forecast) + 1.  U2 compares the forecast's relative
    errors with those of the naive last-value forecast:

        U2 = sqrt( sum(((f_t - y_t) / y_{t-1})^2) / sum(((y_{t-1} - y_t) / y_{t-1})^2) )

    Verdict: worse (U2 > 1), equal (U2 = 1 within tolerance), better (U2 < 1).
    """
    y_full = np.asarray(actual, dtype=np.float64).ravel()
    f = np.asarray(forecast, dtype=np.float64).ravel()
    if y_full.size != f.size + 1:
        raise LengthMismatch(
            f"actual must have one leading value: got {y_full.size} actuals for {f.size} forecasts"
        )
    if f.size < 1:
        raise LengthMismatch("empty forecast")
    if np.any(y_full == 0.0):
        raise ZeroActual("U2 undefined: actual path contains zeros")

    prev = y_full[:-1]
    y = y_full[1:]
    num = np.sum(((f - y) / prev) ** 2)
    den = np.sum(((prev - y) / prev) ** 2)
    if den == 0.0:
        raise ZeroDenominator("naive forecast has zero error on constant actuals")
    u2 = float(np.sqrt(num / den))

    if abs(u2 - 1.0) <= THEIL_EQUALITY_TOL:
        verdict = "equal"
    elif u2 > 1.0:
        verdict = "worse"
    else:
        verdict = "better"
    return TheilVerdict(u2=u2, verdict=verdict)
