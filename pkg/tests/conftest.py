import csv
import datetime as dt

import numpy as np
import pytest

from equicast.data import sample_path


def business_dates(count, start=dt.date(2020, 1, 1)):
    out = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day.isoformat())
        day += dt.timedelta(days=1)
    return out


def write_price_csv(path, prices, dates=None, column="adj_close"):
    prices = np.asarray(prices, dtype=np.float64)
    dates = dates or business_dates(prices.size)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", column])
        for d, p in zip(dates, prices):
            writer.writerow([d, repr(float(p))])
    return path


def random_prices(rng, n, base=100.0, vol=0.01, drift=0.0003):
    steps = rng.standard_normal(n - 1) * vol + drift
    return np.concatenate([[base], base * np.exp(np.cumsum(steps))])


def simulate_var(coef_list, intercept, n, seed, noise=0.1):
    """Plain-loop VAR simulator used as an independent data oracle."""
    rng = np.random.default_rng(seed)
    k = len(intercept)
    p = len(coef_list)
    data = np.zeros((n, k))
    for t in range(p, n):
        value = np.array(intercept, dtype=np.float64)
        for lag, coef in enumerate(coef_list, start=1):
            value = value + np.asarray(coef) @ data[t - lag]
        data[t] = value + rng.standard_normal(k) * noise
    return data


@pytest.fixture(scope="session")
def sp500_sample():
    return sample_path("sp500_sample.csv")


@pytest.fixture(scope="session")
def spdr_sample():
    return sample_path("spdr_sample.csv")


@pytest.fixture
def price_csv(tmp_path):
    def make(prices, dates=None, column="adj_close", name="prices.csv"):
        return write_price_csv(tmp_path / name, prices, dates, column)

    return make
