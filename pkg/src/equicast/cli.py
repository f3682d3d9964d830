"""Command-line interface.

Subcommands: diagnose, fit, forecast, backtest, report.  Configuration
comes from an optional key = value file plus command-line overrides.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .errors import EquicastError, NumericalError, ValidationError
from .pipeline import (
    RunConfig,
    config_from_mapping,
    diagnose,
    fit_models,
    forecast_models,
    load_bundle,
    load_fits,
    parse_config_file,
    run_pipeline,
    save_fits,
)
from .report import emit_report, report_to_dict, write_correlogram_csv
from .plots import emit_plots, plot_data_overview


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--data", help="primary price CSV")
    parser.add_argument("--column", help="value column name (default adj_close)")
    parser.add_argument("--second-data", dest="second_data",
                        help="companion price CSV (required for var)")
    parser.add_argument("--second-column", dest="second_column",
                        help="value column of the companion CSV")
    parser.add_argument("--split", help="TRAIN:TEST row counts (default 93%%:7%%)")
    parser.add_argument("--models", help="comma list from garch,var,lstm,cnn")
    parser.add_argument("--seed", type=int, help="global seed")
    parser.add_argument("--epochs", type=int,
                        help="override both lstm and cnn training epochs")
    parser.add_argument("--out", help="output directory (default out)")
    parser.add_argument("--rolling", action="store_true", default=None,
                        help="one-step-ahead forecasts fed with actual test data")


def build_config(args: argparse.Namespace) -> RunConfig:
    mapping: dict = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    overrides = {
        "data": args.data,
        "column": args.column,
        "second_data": args.second_data,
        "second_column": args.second_column,
        "split": args.split,
        "models": args.models,
        "seed": args.seed,
        "out_dir": args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            mapping[key] = value
    if args.rolling:
        mapping["rolling"] = True
    if args.epochs is not None:
        mapping["lstm_epochs"] = args.epochs
        mapping["cnn_epochs"] = args.epochs
    return config_from_mapping(mapping).validate()


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_diagnose(args) -> int:
    cfg = build_config(args)
    bundle = load_bundle(cfg)
    diag = diagnose(bundle)
    out = _out_dir(cfg)

    (out / "diagnostics.json").write_text(
        json.dumps(diag, sort_keys=True, indent=1) + "\n")
    write_correlogram_csv(diag["acf"], out / "acf.csv")
    write_correlogram_csv(diag["pacf"], out / "pacf.csv")

    doc = {"actual": {
        "dates": list(bundle.primary.test_prices.dates),
        "test_prices": bundle.primary.test_prices.values.tolist(),
        "test_returns": bundle.primary.test_returns.values.tolist(),
        "train_prices_tail": bundle.primary.train_prices.values[-250:].tolist(),
    }}
    plot_data_overview(doc, out / "data_overview.svg")

    r = diag["returns"]
    print(f"observations: {len(bundle.primary.prices)} "
          f"(train {bundle.split_spec.train_len}, test {bundle.split_spec.test_len})")
    print(f"returns: mean {r['mean']:.6g}, std {r['std_dev']:.6g}, "
          f"skew {r['skewness']:.4g}, excess kurtosis {r['kurtosis']:.4g}")
    adf = diag["adf"]
    print(f"adf: t = {adf['t_statistic']:.4f} (5% cv {adf['critical_values']['5%']:.2f}) "
          f"-> {'stationary' if adf['is_stationary'] else 'unit root not rejected'}")
    if "price_correlation" in diag:
        print(f"price correlation with companion: {diag['price_correlation']:.6f}")
        print(f"return correlation with companion: {diag['return_correlation']:.6f}")
    print(f"wrote diagnostics to {out}")
    return 0


def cmd_fit(args) -> int:
    cfg = build_config(args)
    bundle = load_bundle(cfg)
    fits = fit_models(cfg, bundle)
    written = save_fits(fits, _out_dir(cfg))
    for name, fit in fits.items():
        if name == "garch":
            p = fit.params
            print(f"garch({cfg.garch_p},{cfg.garch_q}): omega {p.omega:.3e}, "
                  f"alpha {[round(a, 4) for a in p.alpha]}, "
                  f"beta {[round(b, 4) for b in p.beta]}, "
                  f"log-likelihood {fit.log_likelihood:.2f}, converged {fit.converged}")
        elif name == "var":
            var_fit, selection = fit
            chosen = "auto" if selection else "fixed"
            print(f"var order {var_fit.spec.order} ({chosen}), "
                  f"aic {var_fit.criteria.aic:.4f}, nobs {var_fit.nobs}")
        elif name in ("lstm", "cnn"):
            print(f"{name}: final training loss {fit.loss_history[-1]:.6g}")
        else:
            print(f"hybrid weights: garch {fit.w_garch:.4f}, lstm {fit.w_lstm:.4f}")
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_forecast(args) -> int:
    cfg = build_config(args)
    bundle = load_bundle(cfg)
    out = _out_dir(cfg)
    fits = load_fits(cfg, bundle, out)
    paths = forecast_models(cfg, bundle, fits)

    names = list(paths)
    csv_path = out / "forecasts.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["date", "actual_price", "actual_return"]
        for name in names:
            header += [f"{name}_price", f"{name}_return"]
        writer.writerow(header)
        dates = bundle.primary.test_prices.dates
        ap = bundle.primary.test_prices.values
        ar = bundle.primary.test_returns.values
        for i, date in enumerate(dates):
            row = [date, repr(float(ap[i])), repr(float(ar[i]))]
            for name in names:
                row += [repr(float(paths[name]["prices"][i])),
                        repr(float(paths[name]["returns"][i]))]
            writer.writerow(row)
    print(f"wrote {csv_path}")
    return 0


def cmd_backtest(args) -> int:
    cfg = build_config(args)
    report = run_pipeline(cfg)
    out = _out_dir(cfg)
    written = emit_report(report, out)
    written += emit_plots(report, out)
    doc = report_to_dict(report)
    for line in (out / "summary.txt").read_text().splitlines():
        print(line)
    print()
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_report(args) -> int:
    cfg = build_config(args)
    out = _out_dir(cfg)
    from .report import load_report

    path = out / "report.json"
    if not path.is_file():
        raise ValidationError(f"no report.json in {out}; run backtest first")
    doc = load_report(path)
    written = emit_report(doc, out)
    written += emit_plots(doc, out)
    for p in written:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equicast",
        description="Fit GARCH, VAR, LSTM and 3D-CNN price models and "
                    "compare their forecasts on a common metric report.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_text in (
        ("diagnose", cmd_diagnose, "descriptive statistics, ADF test, correlograms"),
        ("fit", cmd_fit, "fit the enabled models on the training split"),
        ("forecast", cmd_forecast, "forecast the test horizon (reusing saved fits)"),
        ("backtest", cmd_backtest, "full pipeline: fit, forecast, score, report, plots"),
        ("report", cmd_report, "regenerate CSVs, summary and plots from report.json"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except EquicastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
