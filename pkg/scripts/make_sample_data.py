#!/usr/bin/env python3
"""Regenerate the bundled synthetic sample CSVs.

The primary series is a seeded GARCH(1,1) simulation reconstructed into a
price path; the companion series adds small idiosyncratic noise to the
same returns so the pair is highly correlated, like the index/fund pair
the toolkit is meant to compare.  Output is deterministic; rerunning this
script must not change the committed files.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from equicast.garch import GarchParams, GarchSpec, simulate_garch
from equicast.timeseries import ReturnSeries, reconstruct_prices

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "equicast" / "data"

N_PRICES = 2831
START = dt.date(2011, 1, 21)
PRIMARY_ANCHOR = 1283.35
SECOND_ANCHOR = 560.0
SEED = 20110121


def business_days(start: dt.date, count: int) -> list[str]:
    days = []
    day = start
    while len(days) < count:
        if day.weekday() < 5:
            days.append(day.isoformat())
        day += dt.timedelta(days=1)
    return days


def write_csv(path: Path, dates, prices):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "adj_close"])
        for d, p in zip(dates, prices):
            writer.writerow([d, f"{p:.6f}"])


def main():
    params = GarchParams(omega=3.6e-6, alpha=[0.13], beta=[0.84], mu=0.00045)
    spec = GarchSpec(1, 1)
    base = simulate_garch(params, spec, N_PRICES - 1, seed=SEED)

    dates = business_days(START, N_PRICES)
    primary_returns = ReturnSeries(tuple(dates[1:]), base.values, PRIMARY_ANCHOR)
    primary_prices = np.concatenate(
        [[PRIMARY_ANCHOR], reconstruct_prices(primary_returns).values]
    )

    rng = np.random.default_rng(SEED + 1)
    second_values = base.values + rng.standard_normal(base.values.size) * 0.003
    second_returns = ReturnSeries(tuple(dates[1:]), second_values, SECOND_ANCHOR)
    second_prices = np.concatenate(
        [[SECOND_ANCHOR], reconstruct_prices(second_returns).values]
    )

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_csv(OUT_DIR / "sp500_sample.csv", dates, primary_prices)
    write_csv(OUT_DIR / "spdr_sample.csv", dates, second_prices)

    ret_corr = np.corrcoef(base.values, second_values)[0, 1]
    price_corr = np.corrcoef(primary_prices, second_prices)[0, 1]
    print(f"wrote {N_PRICES} rows to {OUT_DIR}")
    print(f"return correlation {ret_corr:.5f}, price correlation {price_corr:.5f}")
    print(f"primary price range [{primary_prices.min():.2f}, {primary_prices.max():.2f}]")


if __name__ == "__main__":
    main()
