"""Vector autoregression: OLS estimation, information criteria, order
selection, and iterated multi-step forecasting.

The residual covariance uses the maximum-likelihood denominator (effective
sample size, not degrees of freedom), matching the FPE and log-likelihood
formulas below.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDataWarning,
    LengthMismatch,
    OrderTooLarge,
    ShapeMismatch,
    SingularCovariance,
    SingularDesign,
)

DEFAULT_MAX_ORDER = 12


@dataclass(frozen=True)
class VarSpec:
    n_series: int
    order: int
    include_intercept: bool = True

    def __post_init__(self):
        if self.n_series < 1 or self.order < 1:
            raise ShapeMismatch(f"need n_series >= 1 and order >= 1, got {self}")


@dataclass(frozen=True)
class InfoCriteria:
    aic: float
    bic: float
    hqic: float
    fpe: float
    log_likelihood: float


@dataclass(frozen=True)
class VarFit:
    spec: VarSpec
    intercept: np.ndarray       # (K,)
    coef: np.ndarray            # (p, K, K); coef[i] maps lag i+1 values to the present
    resid_cov: np.ndarray       # (K, K), ML denominator
    nobs: int
    criteria: InfoCriteria

    def to_dict(self) -> dict:
        return {
            "order": self.spec.order,
            "intercept": self.intercept.tolist(),
            "coef": self.coef.tolist(),
            "resid_cov": self.resid_cov.tolist(),
            "nobs": self.nobs,
            "criteria": {
                "aic": self.criteria.aic,
                "bic": self.criteria.bic,
                "hqic": self.criteria.hqic,
                "fpe": self.criteria.fpe,
                "log_likelihood": self.criteria.log_likelihood,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VarFit":
        coef = np.asarray(d["coef"], dtype=np.float64)
        return cls(
            spec=VarSpec(n_series=coef.shape[1], order=int(d["order"])),
            intercept=np.asarray(d["intercept"], dtype=np.float64),
            coef=coef,
            resid_cov=np.asarray(d["resid_cov"], dtype=np.float64),
            nobs=int(d["nobs"]),
            criteria=InfoCriteria(**d["criteria"]),
        )


@dataclass(frozen=True)
class OrderSelection:
    selected: int
    table: list  # of (order, InfoCriteria)


def _stack(y) -> np.ndarray:
    """Stack K aligned series into a (T, K) array."""
    cols = []
    for s in y:
        v = getattr(s, "values", s)
        cols.append(np.asarray(v, dtype=np.float64).ravel())
    lengths = {c.size for c in cols}
    if len(lengths) != 1:
        raise LengthMismatch(f"series lengths differ: {sorted(lengths)}")
    return np.column_stack(cols)


def build_lag_matrix(y, order: int):
    """Design and target matrices for a VAR(p) regression.

    Z has T-p rows with columns [1, y_{t-1}', ..., y_{t-p}'] and Y has the
    matching y_t' rows.
    """
    data = _stack(y)
    t_total, k = data.shape
    if order < 1:
        raise OrderTooLarge("order must be >= 1")
    if order >= t_total:
        raise OrderTooLarge(f"order {order} >= series length {t_total}")
    rows = t_total - order
    z = np.empty((rows, k * order + 1))
    z[:, 0] = 1.0
    for lag in range(1, order + 1):
        z[:, 1 + (lag - 1) * k : 1 + lag * k] = data[order - lag : t_total - lag]
    return z, data[order:]


def information_criteria(fit: VarFit) -> InfoCriteria:
    """Penalized fit measures recomputed from a fitted VAR."""
    return criteria_from_cov(fit.resid_cov, fit.nobs, fit.spec.n_series,
                             fit.spec.order, fit.spec.include_intercept)


def criteria_from_cov(resid_cov: np.ndarray, nobs: int, n_series: int, order: int,
                      include_intercept: bool = True) -> InfoCriteria:
    """Information criteria from the ML residual covariance.

    With T observations, K series, and m = K*p + 1 parameters per equation:

        AIC  = ln|S| + 2mK/T
        BIC  = ln|S| + mK ln(T)/T
        HQIC = ln|S| + 2mK ln(ln T)/T
        FPE  = |S| ((T + m)/(T - m))^K
        LL   = -(TK/2) ln(2 pi) - (T/2) ln|S| - TK/2
    """
    t, k = nobs, n_series
    resid_cov = np.atleast_2d(np.asarray(resid_cov, dtype=np.float64))
    m = k * order + (1 if include_intercept else 0)
    sign, logdet = np.linalg.slogdet(resid_cov)
    if sign <= 0 or not np.isfinite(logdet):
        raise SingularCovariance("residual covariance is singular")
    det = sign * np.exp(logdet)
    aic = logdet + 2.0 * m * k / t
    bic = logdet + m * k * np.log(t) / t
    hqic = logdet + 2.0 * m * k * np.log(np.log(t)) / t
    fpe = det * ((t + m) / (t - m)) ** k
    ll = -(t * k / 2.0) * np.log(2.0 * np.pi) - (t / 2.0) * logdet - t * k / 2.0
    return InfoCriteria(aic=float(aic), bic=float(bic), hqic=float(hqic),
                        fpe=float(fpe), log_likelihood=float(ll))


def fit_var_ols(y, spec: VarSpec) -> VarFit:
    """Equation-by-equation OLS via a single least-squares solve.

    All-zero input is degenerate but not an error: it yields the zero fit
    with a :class:`DegenerateDataWarning` so downstream scoring stays
    well-defined.
    """
    z, targets = build_lag_matrix(y, spec.order)
    t_eff, k = targets.shape
    if k != spec.n_series:
        raise ShapeMismatch(f"spec says {spec.n_series} series, data has {k}")
    if not spec.include_intercept:
        z = z[:, 1:]

    if not np.any(targets) and not np.any(z[:, 1 if spec.include_intercept else 0 :]):
        warnings.warn("all-zero input; returning the zero fit", DegenerateDataWarning)
        b = np.zeros((z.shape[1], k))
    else:
        b, _, rank, _ = np.linalg.lstsq(z, targets, rcond=None)
        if rank < z.shape[1]:
            raise SingularDesign(f"design matrix rank {rank} < {z.shape[1]} columns")

    resid = targets - z @ b
    resid_cov = resid.T @ resid / t_eff

    if spec.include_intercept:
        intercept = b[0].copy()
        stacked = b[1:]
    else:
        intercept = np.zeros(k)
        stacked = b
    coef = np.empty((spec.order, k, k))
    for lag in range(spec.order):
        # rows of b map regressors to targets; transpose to y_t = A_lag y_{t-lag}
        coef[lag] = stacked[lag * k : (lag + 1) * k].T

    try:
        criteria = criteria_from_cov(resid_cov, t_eff, k, spec.order, spec.include_intercept)
    except SingularCovariance:
        nan = float("nan")
        criteria = InfoCriteria(nan, nan, nan, nan, nan)
    return VarFit(spec=spec, intercept=intercept, coef=coef,
                  resid_cov=resid_cov, nobs=t_eff, criteria=criteria)


def select_order(y, max_p: int = DEFAULT_MAX_ORDER) -> OrderSelection:
    """Fit orders 1..max_p on a common effective sample and pick the lowest AIC.

    Every candidate conditions on the first max_p observations so the
    criteria are comparable across orders.
    """
    data = _stack(y)
    t_total, k = data.shape
    if max_p < 1 or max_p >= t_total / 3:
        raise OrderTooLarge(f"max_p must be in [1, T/3); got {max_p} for T={t_total}")

    table = []
    best_order, best_aic = 1, np.inf
    for order in range(1, max_p + 1):
        trimmed = data[max_p - order :]
        fit = fit_var_ols([trimmed[:, j] for j in range(k)], VarSpec(k, order))
        table.append((order, fit.criteria))
        if fit.criteria.aic < best_aic - 1e-12:
            best_aic = fit.criteria.aic
            best_order = order
    return OrderSelection(selected=best_order, table=table)


def forecast_var(fit: VarFit, recent: np.ndarray, horizon: int) -> np.ndarray:
    """Iterated one-step forecasts, feeding predictions back in.

    ``recent`` holds the last p observations as rows (oldest first).
    Returns a (horizon, K) array.
    """
    p, k = fit.spec.order, fit.spec.n_series
    recent = np.asarray(recent, dtype=np.float64)
    if recent.ndim == 1:
        recent = recent.reshape(-1, 1)
    if recent.shape != (p, k):
        raise ShapeMismatch(f"recent must be ({p}, {k}), got {recent.shape}")
    if horizon < 1:
        raise ShapeMismatch(f"horizon must be >= 1, got {horizon}")

    history = np.vstack([recent, np.zeros((horizon, k))])
    for step in range(horizon):
        t = p + step
        value = fit.intercept.copy()
        for lag in range(1, p + 1):
            value += fit.coef[lag - 1] @ history[t - lag]
        history[t] = value
    return history[p:]
