import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equicast import errors
from equicast.timeseries import (
    PriceSeries,
    ReturnSeries,
    SplitSpec,
    load_csv,
    log_returns,
    reconstruct_prices,
    split,
)

# ln(1.1) to 20 digits: 0.09531017980432486004
LN_1_1 = 0.09531017980432486


def make_prices(values, start=0):
    dates = tuple(f"2020-{1 + (start + i) // 28:02d}-{1 + (start + i) % 28:02d}" for i in range(len(values)))
    return PriceSeries(dates, np.asarray(values, dtype=np.float64))


class TestLoadCsv:
    def test_three_row_file(self, price_csv):
        path = price_csv([100.0, 101.0, 99.5])
        series = load_csv(path, "adj_close")
        assert len(series) == 3
        assert series.values.tolist() == [100.0, 101.0, 99.5]

    def test_rows_resorted_by_date(self, tmp_path):
        path = tmp_path / "shuffled.csv"
        path.write_text("date,px\n2020-01-03,3.0\n2020-01-01,1.0\n2020-01-02,2.0\n")
        series = load_csv(path, "px")
        assert series.values.tolist() == [1.0, 2.0, 3.0]
        assert series.dates == ("2020-01-01", "2020-01-02", "2020-01-03")

    def test_bundled_sample_row_count(self, sp500_sample):
        series = load_csv(sp500_sample, "adj_close")
        assert len(series) == 2831

    def test_missing_column(self, price_csv):
        path = price_csv([100.0, 101.0])
        with pytest.raises(errors.MissingColumn):
            load_csv(path, "close")

    def test_missing_date_column(self, tmp_path):
        path = tmp_path / "nodate.csv"
        path.write_text("day,px\n2020-01-01,1.0\n")
        with pytest.raises(errors.MissingColumn):
            load_csv(path, "px")

    def test_unparseable_row_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("date,px\n2020-01-01,1.0\n2020-01-02,oops\n")
        with pytest.raises(errors.UnparseableRow) as exc:
            load_csv(path, "px")
        assert exc.value.line_number == 3

    def test_missing_value_rejected(self, tmp_path):
        path = tmp_path / "gap.csv"
        path.write_text("date,px\n2020-01-01,1.0\n2020-01-02,\n")
        with pytest.raises(errors.UnparseableRow):
            load_csv(path, "px")

    def test_non_positive_price(self, tmp_path):
        path = tmp_path / "neg.csv"
        path.write_text("date,px\n2020-01-01,1.0\n2020-01-02,-5.0\n")
        with pytest.raises(errors.NonPositivePrice) as exc:
            load_csv(path, "px")
        assert exc.value.date == "2020-01-02"

    def test_duplicate_date(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("date,px\n2020-01-01,1.0\n2020-01-01,2.0\n")
        with pytest.raises(errors.DuplicateDate):
            load_csv(path, "px")


class TestLogReturns:
    def test_constant_prices_give_zero_returns(self):
        r = log_returns(make_prices([100.0, 100.0, 100.0]))
        assert r.values.tolist() == [0.0, 0.0]
        assert r.base_price == 100.0

    def test_ln_ratio_oracle(self):
        r = log_returns(make_prices([100.0, 110.0]))
        assert abs(r.values[0] - LN_1_1) < 1e-15

    def test_dates_align_to_later_price(self):
        p = make_prices([1.0, 2.0, 3.0])
        r = log_returns(p)
        assert r.dates == p.dates[1:]
        assert len(r) == len(p) - 1

    def test_too_short(self):
        with pytest.raises(errors.SeriesTooShort):
            log_returns(PriceSeries(("2020-01-01",), np.array([100.0])))

    def test_bundled_sample_mean(self, sp500_sample):
        # frozen from the committed sample file; guards against data drift
        r = log_returns(load_csv(sp500_sample, "adj_close"))
        assert abs(float(np.mean(r.values)) - 0.000329) < 2e-5


class TestReconstructPrices:
    def test_zero_returns_hold_anchor(self):
        r = ReturnSeries(("a", "b"), np.zeros(2), base_price=50.0)
        p = reconstruct_prices(r, 50.0)
        assert p.values.tolist() == [50.0, 50.0]

    def test_round_trip_identity(self):
        rng = np.random.default_rng(0)
        values = 100.0 * np.exp(np.cumsum(rng.standard_normal(40) * 0.02))
        p = make_prices(values)
        back = reconstruct_prices(log_returns(p), p.values[0])
        np.testing.assert_allclose(back.values, p.values[1:], rtol=1e-9)

    def test_growth_compounds_log_returns(self):
        # returns summing to 0.0517 end at anchor * e**0.0517
        r = ReturnSeries(("a", "b", "c"), np.array([0.02, 0.02, 0.0117]), 1.0)
        p = reconstruct_prices(r, 200.0)
        assert abs(p.values[-1] - 200.0 * math.exp(0.0517)) < 1e-9
        assert abs(p.values[-1] / 200.0 - 1.0531) < 1e-4

    def test_bad_anchor(self):
        r = ReturnSeries(("a",), np.array([0.1]), 1.0)
        with pytest.raises(errors.NonPositivePrice):
            reconstruct_prices(r, 0.0)

    def test_default_anchor_is_base_price(self):
        r = ReturnSeries(("a",), np.array([0.1]), base_price=3.0)
        assert abs(reconstruct_prices(r).values[0] - 3.0 * math.exp(0.1)) < 1e-12


class TestSplit:
    def test_direct_slice(self):
        p = make_prices(np.arange(1.0, 11.0))
        train, test = split(p, SplitSpec(7, 3))
        assert train.values.tolist() == list(range(1, 8))
        assert test.values.tolist() == [8.0, 9.0, 10.0]

    def test_paper_ratio_split(self, sp500_sample):
        series = load_csv(sp500_sample, "adj_close")
        train, test = split(series, SplitSpec(2639, 192))
        assert len(train) == 2639 and len(test) == 192

    def test_length_mismatch(self):
        p = make_prices(np.arange(1.0, 6.0))
        with pytest.raises(errors.LengthMismatch):
            split(p, SplitSpec(5, 1))

    def test_concat_reproduces_series(self):
        p = make_prices(np.arange(1.0, 12.0))
        train, test = split(p, SplitSpec(6, 5))
        assert train.values.tolist() + test.values.tolist() == p.values.tolist()
        assert train.dates + test.dates == p.dates

    def test_return_split_keeps_reconstruction_exact(self):
        rng = np.random.default_rng(3)
        p = make_prices(100.0 * np.exp(np.cumsum(rng.standard_normal(30) * 0.01)))
        r = log_returns(p)
        _, test_r = split(r, SplitSpec(20, 9))
        rebuilt = reconstruct_prices(test_r, test_r.base_price)
        np.testing.assert_allclose(rebuilt.values, p.values[21:], rtol=1e-9)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(min_value=0.1, max_value=1e5,
                       allow_nan=False, allow_infinity=False),
             min_size=2, max_size=40)
)
def test_round_trip_property(values):
    p = make_prices(values)
    back = reconstruct_prices(log_returns(p), p.values[0])
    np.testing.assert_allclose(back.values, p.values[1:], rtol=1e-9)


def test_geometric_sequence_constant_returns():
    g = 1.07
    p = make_prices([100.0 * g**i for i in range(12)])
    r = log_returns(p)
    np.testing.assert_allclose(r.values, math.log(g), rtol=1e-12)


def test_price_series_validation():
    with pytest.raises(errors.NonPositivePrice):
        make_prices([1.0, -2.0]).validate()
    with pytest.raises(errors.DuplicateDate):
        PriceSeries(("a", "a"), np.array([1.0, 2.0])).validate()
    with pytest.raises(errors.SeriesTooShort):
        PriceSeries(("a",), np.array([1.0])).validate()
