"""Report serialization: report.json, the two metric CSVs, and summary.txt.

Every emitted file can be read back by the loaders in this module, and
report.json content is deterministic for a fixed config except for the
``created_at`` timestamp.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .errors import ValidationError
from .pipeline import RunReport, SCHEMA_VERSION

METRIC_ROWS = ("mape", "me", "mae", "mpe", "rmse", "correlation", "minmax", "theil_u2")


def _sanitize(value):
    """Replace non-finite floats with None so report.json is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_sanitize(v) for v in value]
    return value


def report_to_dict(report: RunReport) -> dict:
    models = []
    for m in report.models:
        metrics = {}
        for kind, table in m.metrics.items():
            metrics[kind] = {
                "mape": table.mape, "me": table.me, "mae": table.mae,
                "mpe": table.mpe, "rmse": table.rmse,
                "correlation": table.correlation, "minmax": table.minmax,
                "n": table.n, "target_kind": table.target_kind,
            }
        theil = {}
        for kind, verdict in m.theil.items():
            theil[kind] = None if verdict is None else {
                "u2": verdict.u2, "verdict": verdict.verdict,
            }
        models.append({
            "name": m.name,
            "train_target": m.train_target,
            "forecast_returns": m.forecast_returns.tolist(),
            "forecast_prices": m.forecast_prices.tolist(),
            "metrics": metrics,
            "theil": theil,
            "growth_simple": m.growth_simple,
            "growth_log": m.growth_log,
            "extra": m.extra,
            "notes": m.notes,
        })
    return _sanitize({
        "schema": report.schema,
        "config": report.config,
        "config_hash": report.config_hash,
        "created_at": report.created_at,
        "mode": report.mode,
        "split": report.split,
        "diagnostics": report.diagnostics,
        "actual": report.actual,
        "models": models,
        "best": report.best,
    })


def load_report(path) -> dict:
    """Parse a report.json back into a plain dict, checking the schema tag."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported report schema {doc.get('schema')!r}")
    return doc


def _metric_value(model: dict, kind: str, metric: str):
    if metric == "theil_u2":
        verdict = model["theil"].get(kind)
        return None if verdict is None else verdict["u2"]
    return model["metrics"][kind][metric]


def _write_metrics_csv(doc: dict, kind: str, path: Path):
    names = [m["name"] for m in doc["models"]]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric"] + names + ["BEST"])
        for metric in METRIC_ROWS:
            row = [metric]
            for m in doc["models"]:
                value = _metric_value(m, kind, metric)
                row.append("" if value is None else repr(float(value)))
            best = doc["best"].get(kind, {}).get(metric)
            row.append(best or "")
            writer.writerow(row)


def read_metrics_csv(path) -> dict:
    """Read a metrics CSV back as {metric: {model: value, 'BEST': name}}."""
    out: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "metric" or header[-1] != "BEST":
            raise ValidationError(f"{path} is not a metrics table")
        models = header[1:-1]
        for row in reader:
            values = {}
            for name, cell in zip(models, row[1:-1]):
                values[name] = float(cell) if cell else None
            values["BEST"] = row[-1] or None
            out[row[0]] = values
    return out


def write_correlogram_csv(points: list, path):
    """Write (lag, value, band) rows; accepts [[lag, value, band], ...]."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "value", "band"])
        for lag, value, band in points:
            writer.writerow([lag, repr(float(value)), repr(float(band))])


def read_correlogram_csv(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["lag", "value", "band"]:
            raise ValidationError(f"{path} is not a correlogram table")
        return [[int(r[0]), float(r[1]), float(r[2])] for r in reader]


def _write_order_selection_csv(selection: dict, path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "aic", "bic", "hqic", "fpe"])
        for order, aic, bic, hqic, fpe, _ll in selection["table"]:
            writer.writerow([order, repr(aic), repr(bic), repr(hqic), repr(fpe)])


def _fmt_pct(x: float) -> str:
    return f"{100.0 * x:+.2f}%"


def _summary_lines(doc: dict) -> list[str]:
    actual = doc["actual"]
    horizon = len(actual["test_prices"])
    lines = [
        f"Forecast mode: {doc['mode']} multi-step over {horizon} test observations.",
        "Error sign convention: forecast minus actual. MAPE/MPE are fractions;",
        "percentage columns below multiply by 100.",
        "",
        f"Actual growth over {horizon} steps: {_fmt_pct(actual['growth_simple'])} simple, "
        f"{_fmt_pct(actual['growth_log'])} log.",
        "",
    ]
    for m in doc["models"]:
        verdict = m["theil"].get("prices")
        if verdict:
            theil_text = f"U2 = {verdict['u2']:.4f} ({verdict['verdict']} than guessing)"
        else:
            theil_text = "U2 unavailable"
        price = m["metrics"]["prices"]
        lines.append(
            f"{m['name']}: forecast growth {_fmt_pct(m['growth_simple'])} simple "
            f"({_fmt_pct(m['growth_log'])} log); {theil_text}; "
            f"price RMSE {price['rmse']:.4f}, MAPE {price['mape']:.6f} "
            f"({100 * price['mape']:.4f}%)"
        )
        lines.append(f"    trained on: {m['train_target']}")
        if m["notes"]:
            for note in m["notes"]:
                lines.append(f"    note: {note}")
    lines.append("")
    best_price = doc["best"].get("prices", {})
    if best_price.get("rmse"):
        lines.append(f"Lowest price RMSE: {best_price['rmse']}.")
    return lines


def emit_report(report: RunReport | dict, out_dir) -> list[Path]:
    """Write report.json, metrics CSVs, and summary.txt; returns the paths."""
    doc = report if isinstance(report, dict) else report_to_dict(report)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    path = out / "report.json"
    with path.open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")
    written.append(path)

    for kind, name in (("prices", "metrics_prices.csv"), ("returns", "metrics_returns.csv")):
        path = out / name
        _write_metrics_csv(doc, kind, path)
        written.append(path)

    for m in doc["models"]:
        selection = m.get("extra", {}).get("order_selection")
        if selection:
            path = out / "var_order_criteria.csv"
            _write_order_selection_csv(selection, path)
            written.append(path)

    path = out / "summary.txt"
    path.write_text("\n".join(_summary_lines(doc)) + "\n", encoding="utf-8")
    written.append(path)
    return written
