"""Descriptive statistics and specification diagnostics.

Covers the moment summary used in data reports, ACF/PACF correlograms
for lag selection, an augmented Dickey-Fuller stationarity test with
finite-sample critical values, and Pearson correlation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateVariance,
    LagTooLarge,
    LengthMismatch,
    SeriesTooShort,
    SingularRegression,
    SingularToeplitz,
)

# Finite-sample Dickey-Fuller critical values, regression with constant and
# no trend, interpolated linearly in 1/n between rows.  0.0 is the n -> inf row.
_ADF_ROWS = [
    (25, -3.75, -3.00, -2.63),
    (50, -3.58, -2.93, -2.60),
    (100, -3.51, -2.89, -2.58),
    (250, -3.46, -2.88, -2.57),
    (500, -3.44, -2.87, -2.57),
]
_ADF_INF = (-3.43, -2.86, -2.57)


@dataclass(frozen=True)
class DescriptiveStats:
    """Eight order-free summary statistics of one series.

    ``std_dev`` uses the sample (n-1) denominator and ``variance`` is its
    square.  Kurtosis is excess (Fisher) kurtosis, zero for a normal.
    A constant series sets ``degenerate_variance`` and leaves skewness
    and kurtosis as NaN instead of propagating division by zero.
    """

    mean: float
    median: float
    std_dev: float
    variance: float
    min: float
    max: float
    kurtosis: float
    skewness: float
    degenerate_variance: bool = False


@dataclass(frozen=True)
class AdfResult:
    t_statistic: float
    lags_used: int
    critical_values: dict[str, float]
    is_stationary: bool


@dataclass(frozen=True)
class CorrelogramPoint:
    lag: int
    value: float
    confidence_band: float


def _values(x) -> np.ndarray:
    """Accept a PriceSeries/ReturnSeries or any array-like of numbers."""
    v = getattr(x, "values", x)
    return np.asarray(v, dtype=np.float64).ravel()


def describe(x) -> DescriptiveStats:
    v = _values(x)
    if v.size < 2:
        raise SeriesTooShort("need at least 2 observations")
    mean = float(np.mean(v))
    std = float(np.std(v, ddof=1))
    centered = v - mean
    m2 = float(np.mean(centered**2))
    if m2 == 0.0:
        skew = kurt = float("nan")
        degenerate = True
    else:
        skew = float(np.mean(centered**3) / m2**1.5)
        kurt = float(np.mean(centered**4) / m2**2 - 3.0)
        degenerate = False
    return DescriptiveStats(
        mean=mean,
        median=float(np.median(v)),
        std_dev=std,
        variance=std * std,
        min=float(np.min(v)),
        max=float(np.max(v)),
        kurtosis=kurt,
        skewness=skew,
        degenerate_variance=degenerate,
    )


def acf(x, max_lag: int) -> list[CorrelogramPoint]:
    """Sample autocorrelations for lags 1..max_lag.

    Denominator is the full-sample sum of squared deviations, so every
    value lies in [-1, 1].
    """
    v = _values(x)
    n = v.size
    if max_lag < 1 or max_lag >= n / 2:
        raise LagTooLarge(f"max_lag must be in [1, n/2); got {max_lag} for n={n}")
    centered = v - v.mean()
    denom = float(np.sum(centered**2))
    if denom == 0.0:
        raise DegenerateVariance("autocorrelation undefined for a constant series")
    band = 1.96 / np.sqrt(n)
    points = []
    for k in range(1, max_lag + 1):
        value = float(np.sum(centered[:-k] * centered[k:]) / denom)
        points.append(CorrelogramPoint(lag=k, value=value, confidence_band=band))
    return points


def pacf(x, max_lag: int) -> list[CorrelogramPoint]:
    """Partial autocorrelations via the Durbin-Levinson recursion on the ACF."""
    v = _values(x)
    n = v.size
    rho = np.array([p.value for p in acf(x, max_lag)])
    band = 1.96 / np.sqrt(n)
    phi_prev = np.zeros(0)
    points = []
    for k in range(1, max_lag + 1):
        if k == 1:
            phi_kk = rho[0]
            phi = np.array([phi_kk])
        else:
            num = rho[k - 1] - float(np.sum(phi_prev * rho[k - 2 :: -1][: k - 1]))
            den = 1.0 - float(np.sum(phi_prev * rho[: k - 1]))
            if abs(den) < 1e-14:
                raise SingularToeplitz(f"Durbin-Levinson breakdown at lag {k}")
            phi_kk = num / den
            phi = np.empty(k)
            phi[: k - 1] = phi_prev - phi_kk * phi_prev[::-1]
            phi[k - 1] = phi_kk
        points.append(CorrelogramPoint(lag=k, value=float(phi_kk), confidence_band=band))
        phi_prev = phi
    return points


def _ols(X: np.ndarray, y: np.ndarray):
    """Least squares with coefficient standard errors.

    Returns (beta, se, ssr, nobs).  Raises SingularRegression when the
    design is rank deficient.
    """
    n, k = X.shape
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < k:
        raise SingularRegression("rank-deficient regression design")
    resid = y - X @ beta
    ssr = float(resid @ resid)
    dof = n - k
    if dof <= 0:
        raise SingularRegression("no residual degrees of freedom")
    s2 = ssr / dof
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(s2 * np.diag(xtx_inv))
    return beta, se, ssr, n


def adf_critical_values(nobs: int) -> dict[str, float]:
    """Finite-sample critical values, interpolated linearly in 1/n."""
    grid = np.array([0.0] + [1.0 / row[0] for row in reversed(_ADF_ROWS)])
    out = {}
    for j, level in enumerate(("1%", "5%", "10%")):
        col = np.array([_ADF_INF[j]] + [row[j + 1] for row in reversed(_ADF_ROWS)])
        out[level] = float(np.interp(1.0 / max(nobs, 1), grid, col))
    return out


def adf_test(x, max_lag: int = 0) -> AdfResult:
    """Augmented Dickey-Fuller unit-root test (constant, no trend).

    Fits dx_t = c + g*x_{t-1} + sum(d_i * dx_{t-i}) and reports the t
    statistic of g.  The augmentation order is chosen by minimizing AIC
    over 0..max_lag on a common sample, then the chosen order is refit on
    the longest available sample.  ``max_lag=0`` applies the Schwert rule
    floor(12 * (n/100)**0.25).  The null is a unit root; ``is_stationary``
    is the 5% rejection.
    """
    v = _values(x)
    n = v.size
    if max_lag <= 0:
        max_lag = int(np.floor(12.0 * (n / 100.0) ** 0.25))
    if n <= max_lag + 10:
        raise SeriesTooShort(f"need more than max_lag + 10 = {max_lag + 10} observations")

    dv = np.diff(v)

    def design(k: int, start: int):
        # rows t = start..len(dv)-1 of: dv_t ~ 1 + v_{t-1} + dv_{t-1..t-k}
        rows = len(dv) - start
        X = np.empty((rows, 2 + k))
        X[:, 0] = 1.0
        X[:, 1] = v[start : start + rows]
        for i in range(1, k + 1):
            X[:, 1 + i] = dv[start - i : start - i + rows]
        y = dv[start:]
        return X, y

    best_k, best_aic = 0, np.inf
    for k in range(0, max_lag + 1):
        X, y = design(k, max_lag)
        try:
            _, _, ssr, nobs = _ols(X, y)
        except SingularRegression:
            continue
        aic = nobs * np.log(ssr / nobs) + 2 * (2 + k)
        if aic < best_aic - 1e-12:
            best_aic, best_k = aic, k
    if not np.isfinite(best_aic):
        raise SingularRegression("all candidate ADF regressions were singular")

    X, y = design(best_k, best_k)
    beta, se, _, nobs = _ols(X, y)
    if se[1] == 0.0:
        raise SingularRegression("zero standard error on the level coefficient")
    t_stat = float(beta[1] / se[1])
    crit = adf_critical_values(nobs)
    return AdfResult(
        t_statistic=t_stat,
        lags_used=best_k,
        critical_values=crit,
        is_stationary=bool(t_stat < crit["5%"]),
    )


def pearson(x, y) -> float:
    """Pearson product-moment correlation of two equally long series."""
    a = _values(x)
    b = _values(y)
    if a.size != b.size:
        raise LengthMismatch(f"series differ in length: {a.size} vs {b.size}")
    if a.size < 2:
        raise SeriesTooShort("need at least 2 observations")
    if np.min(a) == np.max(a) or np.min(b) == np.max(b):
        raise DegenerateVariance("correlation undefined when a series is constant")
    da = a - a.mean()
    db = b - b.mean()
    denom = np.sqrt(np.sum(da**2) * np.sum(db**2))
    return float(np.sum(da * db) / denom)
