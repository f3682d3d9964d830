"""Equity price forecasting and model comparison toolkit.

Fits GARCH, VAR, LSTM and 3D-CNN models to daily price series, produces
multi-step forecasts of returns and reconstructed prices, and scores every
model on a shared error-metric and Theil-U2 report.
"""

from . import errors
from .garch import (
    GarchFit,
    GarchParams,
    GarchSpec,
    conditional_variance_path,
    fit_garch,
    forecast_volatility,
    negative_log_likelihood,
    simulate_garch,
)
from .hybrid import ConfidenceWeights, HybridForecast, combine, compute_weights
from .metrics import MetricsTable, TheilVerdict, error_metrics, theil_u2
from .pipeline import RunConfig, RunReport, run_pipeline
from .stats import AdfResult, CorrelogramPoint, DescriptiveStats, acf, adf_test, describe, pacf, pearson
from .timeseries import (
    PriceSeries,
    ReturnSeries,
    SplitSpec,
    load_csv,
    log_returns,
    reconstruct_prices,
    split,
)
from .var import (
    InfoCriteria,
    OrderSelection,
    VarFit,
    VarSpec,
    build_lag_matrix,
    fit_var_ols,
    forecast_var,
    information_criteria,
    select_order,
)

__version__ = "0.1.0"

__all__ = [
    "AdfResult",
    "ConfidenceWeights",
    "CorrelogramPoint",
    "DescriptiveStats",
    "GarchFit",
    "GarchParams",
    "GarchSpec",
    "HybridForecast",
    "InfoCriteria",
    "MetricsTable",
    "OrderSelection",
    "PriceSeries",
    "ReturnSeries",
    "RunConfig",
    "RunReport",
    "SplitSpec",
    "TheilVerdict",
    "VarFit",
    "VarSpec",
    "acf",
    "adf_test",
    "build_lag_matrix",
    "combine",
    "compute_weights",
    "conditional_variance_path",
    "describe",
    "error_metrics",
    "errors",
    "fit_garch",
    "fit_var_ols",
    "forecast_var",
    "forecast_volatility",
    "information_criteria",
    "load_csv",
    "log_returns",
    "negative_log_likelihood",
    "pacf",
    "pearson",
    "reconstruct_prices",
    "run_pipeline",
    "select_order",
    "simulate_garch",
    "split",
    "theil_u2",
]
