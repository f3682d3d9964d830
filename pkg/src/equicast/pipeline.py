"""End-to-end benchmark pipeline: ingest, diagnose, fit, forecast, score.

The pipeline is deterministic for a fixed config: model seeds derive from
the global seed unless set explicitly, and every stage works on immutable
inputs.  Forecasts default to static multi-step (seeded only from training
data); the rolling flag switches every model to one-step-ahead forecasts
that condition on actual test observations.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone

import numpy as np

from . import garch as garch_mod
from . import metrics as metrics_mod
from . import stats as stats_mod
from . import var as var_mod
from .errors import (
    DegenerateVariance,
    EquicastError,
    LengthMismatch,
    ValidationError,
    ZeroActual,
    ZeroDenominator,
)
from .hybrid import combine, compute_weights
from .neural import TrainConfig, fit_cnn3d, fit_lstm_window_model, predict_recursive
from .timeseries import PriceSeries, ReturnSeries, SplitSpec, load_csv, log_returns, split

KNOWN_MODELS = ("garch", "var", "lstm", "cnn")
HYBRID_NAME = "garch_lstm"
MODEL_ORDER = KNOWN_MODELS + (HYBRID_NAME,)
SCHEMA_VERSION = 1

# what each model consumes in training; recorded in the report
TRAIN_TARGETS = {
    "garch": "log_returns",
    "var": "log_returns",
    "lstm": "prices",
    "cnn": "log_returns",
    HYBRID_NAME: "log_returns (weighted combination)",
}


@dataclass(frozen=True)
class RunConfig:
    data: str
    column: str = "adj_close"
    second_data: str | None = None
    second_column: str = "adj_close"
    train_len: int | None = None
    test_len: int | None = None
    models: tuple = KNOWN_MODELS
    hybrid: bool = True
    garch_p: int = 1
    garch_q: int = 1
    var_order: int | None = None        # None selects by AIC
    var_max_order: int = 12
    lstm_window: int = 30
    lstm_epochs: int = 100
    lstm_lr: float = 1e-3
    lstm_seed: int | None = None
    cnn_dims: tuple = (3, 3, 3)
    cnn_window: int = 27
    cnn_epochs: int = 100
    cnn_seed: int | None = None
    batch_size: int = 32
    seed: int = 0
    rolling: bool = False
    out_dir: str = "out"

    def validate(self) -> "RunConfig":
        bad = [m for m in self.models if m not in KNOWN_MODELS]
        if bad:
            raise ValidationError(f"unknown models {bad}; choose from {list(KNOWN_MODELS)}")
        if not self.models:
            raise ValidationError("at least one model must be enabled")
        if "var" in self.models and not self.second_data:
            raise ValidationError("the var model needs --second-data (two endogenous series)")
        if (self.train_len is None) != (self.test_len is None):
            raise ValidationError("set both train and test lengths, or neither")
        return self

    @property
    def resolved_lstm_seed(self) -> int:
        return self.seed if self.lstm_seed is None else self.lstm_seed

    @property
    def resolved_cnn_seed(self) -> int:
        return self.seed + 1 if self.cnn_seed is None else self.cnn_seed

    def to_dict(self, include_out_dir: bool = True) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "out_dir" and not include_out_dir:
                continue
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def content_hash(self) -> str:
        # the output directory is not part of the run's semantics
        canonical = json.dumps(self.to_dict(include_out_dir=False), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_config_file(path) -> dict:
    """Read a plain key = value config file; '#' starts a comment."""
    raw = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ValidationError(f"{path}:{lineno}: expected key = value, got {text!r}")
            key, value = text.split("=", 1)
            raw[key.strip().replace("-", "_")] = value.strip()
    return raw


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def config_from_mapping(mapping: dict) -> RunConfig:
    """Build a RunConfig from string-ish values (config file or CLI)."""
    m = dict(mapping)
    kwargs = {}
    if "split" in m:
        text = str(m.pop("split"))
        try:
            train, test = text.split(":")
            kwargs["train_len"] = int(train)
            kwargs["test_len"] = int(test)
        except ValueError:
            raise ValidationError(f"split must be TRAIN:TEST, got {text!r}") from None
    known = {f.name: f for f in fields(RunConfig)}
    for key, value in m.items():
        if key not in known:
            raise ValidationError(f"unknown config key {key!r}")
        if value is None:
            continue
        if key == "models":
            if isinstance(value, str):
                value = tuple(s.strip() for s in value.split(",") if s.strip())
            else:
                value = tuple(value)
        elif key == "cnn_dims":
            if isinstance(value, str):
                parts = value.replace("x", ",").split(",")
                value = tuple(int(s) for s in parts if s.strip())
            else:
                value = tuple(int(s) for s in value)
        elif key in ("hybrid", "rolling") and isinstance(value, str):
            try:
                value = _BOOL[value.lower()]
            except KeyError:
                raise ValidationError(f"{key} must be true/false, got {value!r}") from None
        elif isinstance(value, str):
            target = known[key].type
            if key in ("train_len", "test_len", "var_order", "lstm_seed", "cnn_seed"):
                value = int(value) if value.lower() not in ("", "none", "auto") else None
            elif "int" in str(target):
                value = int(value)
            elif "float" in str(target):
                value = float(value)
        kwargs[key] = value
    if "data" not in kwargs:
        raise ValidationError("config needs a data path")
    return RunConfig(**kwargs)


@contextmanager
def _stage(name: str):
    """Tag propagated errors with the pipeline stage that raised them."""
    try:
        yield
    except EquicastError as exc:
        exc.args = (f"[{name}] {exc}",) + exc.args[1:]
        raise


# ----------------------------------------------------------------- data set

@dataclass
class SeriesBundle:
    prices: PriceSeries
    returns: ReturnSeries
    train_prices: PriceSeries
    test_prices: PriceSeries
    train_returns: ReturnSeries
    test_returns: ReturnSeries


@dataclass
class DataBundle:
    primary: SeriesBundle
    second: SeriesBundle | None
    split_spec: SplitSpec

    @property
    def horizon(self) -> int:
        return len(self.primary.test_prices)

    @property
    def anchor_price(self) -> float:
        return float(self.primary.train_prices.values[-1])


def _bundle_series(prices: PriceSeries, spec: SplitSpec) -> SeriesBundle:
    returns = log_returns(prices)
    train_p, test_p = split(prices, spec)
    train_r, test_r = split(returns, SplitSpec(spec.train_len - 1, spec.test_len))
    return SeriesBundle(prices, returns, train_p, test_p, train_r, test_r)


def load_bundle(cfg: RunConfig) -> DataBundle:
    with _stage("ingest"):
        prices = load_csv(cfg.data, cfg.column)
        n = len(prices)
        if cfg.train_len is None:
            train_len = round(0.93 * n)
            spec = SplitSpec(train_len, n - train_len)
        else:
            spec = SplitSpec(cfg.train_len, cfg.test_len)
            if spec.train_len + spec.test_len != n:
                raise LengthMismatch(
                    f"split {spec.train_len}:{spec.test_len} does not cover {n} rows"
                )
        primary = _bundle_series(prices, spec)
        second = None
        if cfg.second_data:
            second_prices = load_csv(cfg.second_data, cfg.second_column)
            if len(second_prices) != n:
                raise LengthMismatch(
                    f"second series has {len(second_prices)} rows, primary has {n}"
                )
            if second_prices.dates != prices.dates:
                raise ValidationError("second series dates do not match the primary series")
            second = _bundle_series(second_prices, spec)
    return DataBundle(primary=primary, second=second, split_spec=spec)


# -------------------------------------------------------------- diagnostics

def diagnose(bundle: DataBundle, max_lag: int = 20) -> dict:
    """Descriptive statistics and stationarity checks on the training data."""
    with _stage("diagnose"):
        train_r = bundle.primary.train_returns
        desc = stats_mod.describe(train_r)
        adf = stats_mod.adf_test(train_r)
        lag = max(1, min(max_lag, (len(train_r) - 1) // 2))
        acf_pts = stats_mod.acf(train_r, lag)
        pacf_pts = stats_mod.pacf(train_r, lag)
        out = {
            "returns": {
                "mean": desc.mean, "median": desc.median, "std_dev": desc.std_dev,
                "variance": desc.variance, "min": desc.min, "max": desc.max,
                "kurtosis": desc.kurtosis, "skewness": desc.skewness,
            },
            "adf": {
                "t_statistic": adf.t_statistic,
                "lags_used": adf.lags_used,
                "critical_values": adf.critical_values,
                "is_stationary": adf.is_stationary,
            },
            "acf": [[p.lag, p.value, p.confidence_band] for p in acf_pts],
            "pacf": [[p.lag, p.value, p.confidence_band] for p in pacf_pts],
        }
        if bundle.second is not None:
            out["price_correlation"] = stats_mod.pearson(
                bundle.primary.prices, bundle.second.prices
            )
            out["return_correlation"] = stats_mod.pearson(
                bundle.primary.returns, bundle.second.returns
            )
    return out


# ------------------------------------------------------------------ fitting

def fit_models(cfg: RunConfig, bundle: DataBundle) -> dict:
    """Fit every enabled model on the training slice.

    Returns a mapping of model name to its fitted object; the hybrid entry
    holds the confidence weights computed on a held-out validation slice.
    """
    fits: dict = {}
    train_r = bundle.primary.train_returns
    train_p = bundle.primary.train_prices

    if "garch" in cfg.models:
        with _stage("fit:garch"):
            fits["garch"] = garch_mod.fit_garch(
                train_r, garch_mod.GarchSpec(cfg.garch_p, cfg.garch_q)
            )
    if "var" in cfg.models:
        with _stage("fit:var"):
            series = [train_r.values, bundle.second.train_returns.values]
            selection = None
            order = cfg.var_order
            if order is None:
                selection = var_mod.select_order(series, cfg.var_max_order)
                order = selection.selected
            fit = var_mod.fit_var_ols(series, var_mod.VarSpec(2, order))
            fits["var"] = (fit, selection)
    if "lstm" in cfg.models:
        with _stage("fit:lstm"):
            fits["lstm"] = fit_lstm_window_model(train_p, _lstm_config(cfg))
    if "cnn" in cfg.models:
        with _stage("fit:cnn"):
            fits["cnn"] = fit_cnn3d(train_r, _cnn_config(cfg), cfg.cnn_dims)

    if _hybrid_enabled(cfg):
        with _stage("fit:garch_lstm"):
            fits[HYBRID_NAME] = _hybrid_weights(cfg, bundle)
    return fits


def _hybrid_enabled(cfg: RunConfig) -> bool:
    return cfg.hybrid and "garch" in cfg.models and "lstm" in cfg.models


def _lstm_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(epochs=cfg.lstm_epochs, window=cfg.lstm_window,
                       batch_size=cfg.batch_size, seed=cfg.resolved_lstm_seed,
                       lr=cfg.lstm_lr)


def _cnn_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(epochs=cfg.cnn_epochs, window=cfg.cnn_window,
                       batch_size=cfg.batch_size, seed=cfg.resolved_cnn_seed)


FIT_FILES = {
    "garch": "garch_fit.json",
    "var": "var_fit.json",
    "lstm": "lstm_model.ckpt",
    "cnn": "cnn_model.ckpt",
    HYBRID_NAME: "hybrid_weights.json",
}


def save_fits(fits: dict, out_dir) -> list:
    """Persist fitted models so `forecast` can run without refitting."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, fit in fits.items():
        path = out / FIT_FILES[name]
        if name == "garch":
            path.write_text(json.dumps(fit.to_dict(), sort_keys=True, indent=1))
        elif name == "var":
            var_fit, selection = fit
            doc = {"fit": var_fit.to_dict(), "selection": None}
            if selection is not None:
                doc["selection"] = {
                    "selected": selection.selected,
                    "table": [[o, c.aic, c.bic, c.hqic, c.fpe, c.log_likelihood]
                              for o, c in selection.table],
                }
            path.write_text(json.dumps(doc, sort_keys=True, indent=1))
        elif name in ("lstm", "cnn"):
            fit.save(path)
        elif name == HYBRID_NAME:
            path.write_text(json.dumps(
                {"w_garch": fit.w_garch, "w_lstm": fit.w_lstm}, sort_keys=True))
        written.append(path)
    return written


def load_fits(cfg: RunConfig, bundle: DataBundle, out_dir) -> dict:
    """Load saved fits where present, fitting anything that is missing."""
    from pathlib import Path

    from .hybrid import ConfidenceWeights
    from .neural import SequenceModel

    out = Path(out_dir)
    fits: dict = {}
    wanted = [m for m in KNOWN_MODELS if m in cfg.models]
    if _hybrid_enabled(cfg):
        wanted.append(HYBRID_NAME)
    missing = []
    for name in wanted:
        path = out / FIT_FILES[name]
        if not path.is_file():
            missing.append(name)
            continue
        if name == "garch":
            doc = json.loads(path.read_text())
            fits[name] = garch_mod.GarchFit.from_dict(
                doc, bundle.primary.train_returns.values)
        elif name == "var":
            doc = json.loads(path.read_text())
            selection = None
            if doc.get("selection"):
                sel = doc["selection"]
                selection = var_mod.OrderSelection(
                    selected=sel["selected"],
                    table=[(row[0], var_mod.InfoCriteria(*row[1:])) for row in sel["table"]],
                )
            fits[name] = (var_mod.VarFit.from_dict(doc["fit"]), selection)
        elif name in ("lstm", "cnn"):
            fits[name] = SequenceModel.load(path)
        elif name == HYBRID_NAME:
            doc = json.loads(path.read_text())
            fits[name] = ConfidenceWeights(doc["w_garch"], doc["w_lstm"])
    if missing:
        from dataclasses import replace

        for name in missing:
            if name == HYBRID_NAME:
                with _stage("fit:garch_lstm"):
                    fits[HYBRID_NAME] = _hybrid_weights(cfg, bundle)
            else:
                sub = replace(cfg, models=(name,), hybrid=False)
                fits.update(fit_models(sub, bundle))
    return fits


def _hybrid_weights(cfg: RunConfig, bundle: DataBundle):
    """Confidence weights from a validation slice held out of both fits.

    The last tenth of the training returns is the validation horizon; both
    components are refit on the remainder and their validation forecasts
    scored by RMSE against the held-out returns.
    """
    train_r = bundle.primary.train_returns.values
    train_p = bundle.primary.train_prices.values
    val_len = max(2, round(0.1 * train_r.size))
    fit_r = train_r[:-val_len]
    fit_p = train_p[: train_p.size - val_len]
    val_actual = train_r[-val_len:]

    pre_garch = garch_mod.fit_garch(fit_r, garch_mod.GarchSpec(cfg.garch_p, cfg.garch_q))
    garch_val = np.full(val_len, pre_garch.params.mu)

    pre_lstm = fit_lstm_window_model(fit_p, _lstm_config(cfg))
    window = pre_lstm.window
    if cfg.rolling:
        base = train_p[train_p.size - val_len - window : train_p.size - 1]
        wins = base[np.arange(window)[None, :] + np.arange(val_len)[:, None]]
        price_path = pre_lstm.predict_batch(wins)
        prev = train_p[train_p.size - val_len - 1 : train_p.size - 1]
        lstm_val = np.log(np.maximum(price_path, 1e-300) / prev)
    else:
        price_path = predict_recursive(pre_lstm, fit_p[-window:], val_len)
        prev = np.concatenate([[fit_p[-1]], price_path[:-1]])
        lstm_val = np.log(np.maximum(price_path, 1e-300) / prev)

    return compute_weights(val_actual, garch_val, lstm_val)


# -------------------------------------------------------------- forecasting

def _returns_to_prices(returns_path, anchor, prev_actual, rolling):
    if rolling:
        return prev_actual * np.exp(returns_path)
    return anchor * np.exp(np.cumsum(returns_path))


def _prices_to_returns(price_path, anchor, prev_actual, rolling):
    price_path = np.maximum(price_path, 1e-300)
    if rolling:
        return np.log(price_path / prev_actual)
    return np.diff(np.log(np.concatenate([[anchor], price_path])))


def forecast_models(cfg: RunConfig, bundle: DataBundle, fits: dict) -> dict:
    """Produce a return and price path over the test horizon per model."""
    horizon = bundle.horizon
    anchor = bundle.anchor_price
    train_r = bundle.primary.train_returns.values
    all_r = bundle.primary.returns.values
    train_p = bundle.primary.train_prices.values
    all_p = bundle.primary.prices.values
    test_p = bundle.primary.test_prices.values
    prev_actual = np.concatenate([[anchor], test_p[:-1]])
    rolling = cfg.rolling
    paths: dict = {}

    if "garch" in fits:
        with _stage("forecast:garch"):
            fit = fits["garch"]
            rets = np.full(horizon, fit.params.mu)
            if rolling:
                sig2 = garch_mod.conditional_variance_path(all_r, fit.params, fit.spec)
                vol = np.sqrt(sig2[train_r.size :])
            else:
                vol = garch_mod.forecast_volatility(fit, train_r, horizon)
            paths["garch"] = {
                "returns": rets,
                "prices": _returns_to_prices(rets, anchor, prev_actual, rolling),
                "volatility": vol,
            }
    if "var" in fits:
        with _stage("forecast:var"):
            fit, _ = fits["var"]
            order = fit.spec.order
            if rolling:
                second_all = bundle.second.returns.values
                z, _ = var_mod.build_lag_matrix([all_r, second_all], order)
                preds = np.empty((z.shape[0], 2))
                preds[:] = fit.intercept
                for lag in range(order):
                    block = z[:, 1 + lag * 2 : 3 + lag * 2]
                    preds += block @ fit.coef[lag].T
                rets = preds[-horizon:, 0]
            else:
                second_train = bundle.second.train_returns.values
                recent = np.column_stack([train_r, second_train])[-order:]
                rets = var_mod.forecast_var(fit, recent, horizon)[:, 0]
            paths["var"] = {
                "returns": rets,
                "prices": _returns_to_prices(rets, anchor, prev_actual, rolling),
            }
    if "lstm" in fits:
        with _stage("forecast:lstm"):
            model = fits["lstm"]
            w = model.window
            if rolling:
                base = all_p[train_p.size - w : -1]
                wins = base[np.arange(w)[None, :] + np.arange(horizon)[:, None]]
                price_path = model.predict_batch(wins)
            else:
                price_path = predict_recursive(model, train_p[-w:], horizon)
            paths["lstm"] = {
                "returns": _prices_to_returns(price_path, anchor, prev_actual, rolling),
                "prices": price_path,
            }
    if "cnn" in fits:
        with _stage("forecast:cnn"):
            model = fits["cnn"]
            w = model.window
            if rolling:
                base = all_r[train_r.size - w : train_r.size + horizon - 1]
                wins = base[np.arange(w)[None, :] + np.arange(horizon)[:, None]]
                rets = model.predict_batch(wins)
            else:
                rets = predict_recursive(model, train_r[-w:], horizon)
            paths["cnn"] = {
                "returns": rets,
                "prices": _returns_to_prices(rets, anchor, prev_actual, rolling),
            }
    if HYBRID_NAME in fits:
        with _stage("forecast:garch_lstm"):
            weights = fits[HYBRID_NAME]
            hf = combine(paths["garch"]["returns"], paths["lstm"]["returns"], weights,
                         volatility=paths["garch"].get("volatility"))
            paths[HYBRID_NAME] = {
                "returns": hf.combined,
                "prices": _returns_to_prices(hf.combined, anchor, prev_actual, rolling),
                "volatility": hf.volatility,
                "weights": {"garch": weights.w_garch, "lstm": weights.w_lstm},
            }
    return paths


# ------------------------------------------------------------------ scoring

def _nan_metrics(y, f, kind) -> metrics_mod.MetricsTable:
    err = f - y
    nonzero = np.all(y != 0.0)
    mape = float(np.mean(np.abs(err) / np.abs(y))) if nonzero else float("nan")
    mpe = float(np.mean(err / y)) if nonzero else float("nan")
    try:
        corr = stats_mod.pearson(y, f)
    except DegenerateVariance:
        corr = float("nan")
    pos = (y > 0) & (f > 0)
    minmax = float(1.0 - np.mean(np.minimum(y[pos], f[pos]) / np.maximum(y[pos], f[pos]))) \
        if np.any(pos) else float("nan")
    return metrics_mod.MetricsTable(
        mape=mape, me=float(np.mean(err)), mae=float(np.mean(np.abs(err))),
        mpe=mpe, rmse=float(np.sqrt(np.mean(err**2))), correlation=corr,
        minmax=minmax, n=int(y.size), target_kind=kind,
    )


def _score(actual, forecast, kind, preceding, notes: list):
    """Metrics plus Theil verdict, degrading gracefully on degenerate paths."""
    y = np.asarray(actual, dtype=np.float64)
    f = np.asarray(forecast, dtype=np.float64)
    try:
        table = metrics_mod.error_metrics(y, f, kind)
    except (ZeroActual, DegenerateVariance) as exc:
        notes.append(f"{kind}: {exc}")
        table = _nan_metrics(y, f, kind)
    try:
        theil = metrics_mod.theil_u2(np.concatenate([[preceding], y]), f)
    except (ZeroActual, ZeroDenominator) as exc:
        notes.append(f"{kind} theil: {exc}")
        theil = None
    return table, theil


@dataclass
class ModelResult:
    name: str
    train_target: str
    forecast_returns: np.ndarray
    forecast_prices: np.ndarray
    metrics: dict            # target kind -> MetricsTable
    theil: dict              # target kind -> TheilVerdict | None
    growth_simple: float
    growth_log: float
    extra: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class RunReport:
    schema: int
    config: dict
    config_hash: str
    created_at: str
    mode: str
    split: dict
    diagnostics: dict
    actual: dict
    models: list
    best: dict


def _growths(end_price: float, anchor: float) -> tuple[float, float]:
    return end_price / anchor - 1.0, float(np.log(end_price / anchor))


def _best_table(models: list) -> dict:
    """Per metric and target, the winning model (ties to the first in order)."""
    best: dict = {}
    for kind in ("returns", "log_prices", "prices"):
        row: dict = {}
        for metric in ("mape", "me", "mae", "mpe", "rmse", "correlation", "minmax", "theil_u2"):
            candidates = []
            for m in models:
                if metric == "theil_u2":
                    verdict = m.theil.get(kind)
                    value = verdict.u2 if verdict else float("nan")
                else:
                    value = getattr(m.metrics[kind], metric)
                if np.isfinite(value):
                    candidates.append((m.name, value))
            if not candidates:
                row[metric] = None
                continue
            if metric == "correlation":
                row[metric] = max(candidates, key=lambda c: c[1])[0]
            else:
                row[metric] = min(candidates, key=lambda c: abs(c[1]))[0]
        best[kind] = row
    return best


def run_pipeline(cfg: RunConfig) -> RunReport:
    cfg.validate()
    bundle = load_bundle(cfg)
    diagnostics = diagnose(bundle)
    fits = fit_models(cfg, bundle)
    paths = forecast_models(cfg, bundle, fits)

    anchor = bundle.anchor_price
    test_p = bundle.primary.test_prices.values
    test_r = bundle.primary.test_returns.values
    last_train_r = float(bundle.primary.train_returns.values[-1])
    log_test_p = np.log(test_p)
    log_anchor = float(np.log(anchor))

    with _stage("score"):
        models = []
        for name in MODEL_ORDER:
            if name not in paths:
                continue
            p = paths[name]
            notes: list = []
            m_ret, t_ret = _score(test_r, p["returns"], "return", last_train_r, notes)
            m_log, t_log = _score(log_test_p, np.log(np.maximum(p["prices"], 1e-300)),
                                  "log_price", log_anchor, notes)
            m_price, t_price = _score(test_p, p["prices"], "price", anchor, notes)
            growth_simple, growth_log = _growths(float(p["prices"][-1]), anchor)
            extra = {}
            if name == "garch":
                extra = {"fit": fits["garch"].to_dict(),
                         "volatility": p["volatility"].tolist()}
            elif name == "var":
                fit, selection = fits["var"]
                extra = {"fit": fit.to_dict()}
                if selection is not None:
                    extra["order_selection"] = {
                        "selected": selection.selected,
                        "table": [
                            [o, c.aic, c.bic, c.hqic, c.fpe, c.log_likelihood]
                            for o, c in selection.table
                        ],
                    }
            elif name in ("lstm", "cnn"):
                model = fits[name]
                extra = {"final_loss": model.loss_history[-1] if model.loss_history else None,
                         "window": model.window}
                if name == "cnn":
                    extra["dims"] = list(model.dims)
            elif name == HYBRID_NAME:
                extra = {"weights": p["weights"],
                         "volatility": p["volatility"].tolist() if p.get("volatility") is not None else None,
                         "volatility_proxy": "squared test returns"}
            models.append(ModelResult(
                name=name,
                train_target=TRAIN_TARGETS[name],
                forecast_returns=np.asarray(p["returns"], dtype=np.float64),
                forecast_prices=np.asarray(p["prices"], dtype=np.float64),
                metrics={"returns": m_ret, "log_prices": m_log, "prices": m_price},
                theil={"returns": t_ret, "log_prices": t_log, "prices": t_price},
                growth_simple=growth_simple,
                growth_log=growth_log,
                extra=extra,
                notes=notes,
            ))

    actual_simple, actual_log = _growths(float(test_p[-1]), anchor)
    actual = {
        "dates": list(bundle.primary.test_prices.dates),
        "test_prices": test_p.tolist(),
        "test_returns": test_r.tolist(),
        "anchor_price": anchor,
        "last_train_return": last_train_r,
        "growth_simple": actual_simple,
        "growth_log": actual_log,
        "train_prices_tail": bundle.primary.train_prices.values[-250:].tolist(),
    }

    return RunReport(
        schema=SCHEMA_VERSION,
        config=cfg.to_dict(include_out_dir=False),
        config_hash=cfg.content_hash(),
        created_at=datetime.now(timezone.utc).isoformat(),
        mode="rolling" if cfg.rolling else "static",
        split={"train_len": bundle.split_spec.train_len, "test_len": bundle.split_spec.test_len},
        diagnostics=diagnostics,
        actual=actual,
        models=models,
        best=_best_table(models),
    )
