"""SVG figure rendering for the report: data panels, per-model price
charts, and predicted-vs-actual return scatters.

Uses the Agg backend so figures render headless; every file is plain SVG
text with no display dependency.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

AXIS_MARGIN = 0.05


def _date_ticks(ax, dates, max_ticks=6):
    n = len(dates)
    step = max(1, n // max_ticks)
    idx = list(range(0, n, step))
    ax.set_xticks(idx)
    ax.set_xticklabels([dates[i] for i in idx], rotation=30, ha="right", fontsize=7)


def _padded_limits(*arrays):
    lo = min(float(np.min(a)) for a in arrays)
    hi = max(float(np.max(a)) for a in arrays)
    span = hi - lo
    pad = AXIS_MARGIN * span if span > 0 else max(abs(hi), 1.0) * AXIS_MARGIN
    return lo - pad, hi + pad


def _save(fig, path: Path):
    fig.savefig(path, format="svg")
    plt.close(fig)


def plot_data_overview(doc: dict, path: Path):
    """Price and return overview panels for the test window context."""
    actual = doc["actual"]
    tail = np.asarray(actual.get("train_prices_tail", []), dtype=np.float64)
    test_prices = np.asarray(actual["test_prices"], dtype=np.float64)
    returns = np.asarray(actual["test_returns"], dtype=np.float64)
    full_prices = np.concatenate([tail, test_prices])

    fig, axes = plt.subplots(2, 2, figsize=(10, 7))
    ax = axes[0, 0]
    ax.plot(np.arange(full_prices.size), full_prices, lw=0.8, color="tab:blue")
    ax.axvline(tail.size, color="gray", ls="--", lw=0.8)
    ax.set_title("price path into the test window")
    ax.set_ylabel("price")

    ax = axes[0, 1]
    ax.hist(full_prices, bins=40, color="tab:blue", alpha=0.75)
    ax.set_title("price distribution")

    ax = axes[1, 0]
    ax.scatter(np.arange(returns.size), returns, s=4, color="tab:green")
    ax.axhline(0.0, color="gray", lw=0.6)
    ax.set_title("test log returns")
    ax.set_ylabel("log return")

    ax = axes[1, 1]
    ax.hist(returns, bins=40, color="tab:green", alpha=0.75)
    ax.set_title("return distribution")

    fig.tight_layout()
    _save(fig, path)


def plot_price_forecast(doc: dict, model: dict, path: Path):
    """Actual vs forecast price lines over the test horizon."""
    actual = np.asarray(doc["actual"]["test_prices"], dtype=np.float64)
    forecast = np.asarray(model["forecast_prices"], dtype=np.float64)
    dates = doc["actual"]["dates"]

    fig, ax = plt.subplots(figsize=(9, 5))
    x = np.arange(actual.size)
    ax.plot(x, actual, label="actual", lw=1.1, color="black")
    ax.plot(x, forecast, label="forecast", lw=1.1, color="tab:red")
    ax.set_ylim(*_padded_limits(actual, forecast))
    ax.set_xlim(*_padded_limits(x))
    _date_ticks(ax, dates)
    verdict = model["theil"].get("prices")
    subtitle = f" (U2 {verdict['u2']:.3f}, {verdict['verdict']})" if verdict else ""
    ax.set_title(f"{model['name']} predicted price movement{subtitle}")
    ax.set_ylabel("price")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_return_scatter(doc: dict, model: dict, path: Path):
    """Predicted vs original returns, with the diagonal for reference."""
    actual = np.asarray(doc["actual"]["test_returns"], dtype=np.float64)
    forecast = np.asarray(model["forecast_returns"], dtype=np.float64)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.scatter(actual, forecast, s=8, alpha=0.7, color="tab:purple")
    lo, hi = _padded_limits(actual, forecast)
    ax.plot([lo, hi], [lo, hi], color="gray", lw=0.7, ls="--")
    ax.set_xlim(lo, hi)
    ax.set_ylim(lo, hi)
    corr = model["metrics"]["returns"]["correlation"]
    corr_text = "n/a" if corr is None or not np.isfinite(corr) else f"{corr:.4f}"
    ax.set_title(f"{model['name']} predicted vs original returns (corr {corr_text})")
    ax.set_xlabel("original return")
    ax.set_ylabel("predicted return")
    fig.tight_layout()
    _save(fig, path)


def emit_plots(report, out_dir) -> list[Path]:
    """Render the shared data panels plus one price chart and one return
    scatter per model; returns the written SVG paths."""
    from .report import report_to_dict
    from .pipeline import RunReport

    doc = report_to_dict(report) if isinstance(report, RunReport) else report
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "data_overview.svg"
    plot_data_overview(doc, path)
    written.append(path)

    for model in doc["models"]:
        path = out / f"price_{model['name']}.svg"
        plot_price_forecast(doc, model, path)
        written.append(path)
        path = out / f"returns_scatter_{model['name']}.svg"
        plot_return_scatter(doc, model, path)
        written.append(path)
    return written
