"""Price series ingestion, log-return conversion, and chronological splits.

Dates are carried as opaque ordered labels (ISO strings sort correctly);
no calendar arithmetic is performed, so the series contains exactly the
trading days present in the input file.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateDate,
    LengthMismatch,
    MissingColumn,
    NonPositivePrice,
    SeriesTooShort,
    UnparseableRow,
    ValidationError,
)

DATE_COLUMN = "date"


@dataclass(frozen=True)
class PriceSeries:
    """Dated sequence of strictly positive prices."""

    dates: tuple[str, ...]
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if len(self.dates) != len(self.values):
            raise LengthMismatch("dates and values differ in length")

    def __len__(self):
        return len(self.values)

    def validate(self) -> "PriceSeries":
        """Check the full set of invariants; raises on violation."""
        if len(self) < 2:
            raise SeriesTooShort(f"{self.label or 'price series'}: need at least 2 prices")
        if not np.all(np.isfinite(self.values)):
            raise UnparseableRow(-1, "non-finite price value")
        bad = np.nonzero(self.values <= 0)[0]
        if bad.size:
            raise NonPositivePrice(self.dates[bad[0]])
        for a, b in zip(self.dates, self.dates[1:]):
            if a == b:
                raise DuplicateDate(a)
            if a > b:
                raise ValidationError(f"dates out of order at {b}")
        return self


@dataclass(frozen=True)
class ReturnSeries:
    """Log returns aligned to dates, one fewer than the source prices.

    ``base_price`` is the price on the date preceding the first return,
    which makes price reconstruction exact.
    """

    dates: tuple[str, ...]
    values: np.ndarray
    base_price: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if len(self.dates) != len(self.values):
            raise LengthMismatch("dates and values differ in length")

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SplitSpec:
    """Chronological train/test partition sizes."""

    train_len: int
    test_len: int

    def __post_init__(self):
        if self.train_len < 1 or self.test_len < 1:
            raise LengthMismatch("train_len and test_len must both be >= 1")


def load_csv(path: str | Path, column: str, label: str = "") -> PriceSeries:
    """Load one price column from a CSV file with a header row.

    The file must contain a ``date`` column (ISO yyyy-mm-dd) and the named
    value column.  Rows are re-sorted ascending by date.  Missing values
    are rejected, not imputed.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise UnparseableRow(1, "empty file, no header row")
        fields = [f.strip() for f in reader.fieldnames]
        if DATE_COLUMN not in fields:
            raise MissingColumn(f"{path}: no '{DATE_COLUMN}' column")
        if column not in fields:
            raise MissingColumn(f"{path}: no '{column}' column")
        rows = []
        for i, row in enumerate(reader, start=2):
            raw_date = (row.get(DATE_COLUMN) or "").strip()
            raw_value = (row.get(column) or "").strip()
            if not raw_date:
                raise UnparseableRow(i, "empty date")
            if not raw_value:
                raise UnparseableRow(i, f"missing value in column '{column}'")
            try:
                value = float(raw_value)
            except ValueError:
                raise UnparseableRow(i, f"cannot parse '{raw_value}' as a number") from None
            if not math.isfinite(value):
                raise UnparseableRow(i, f"non-finite value '{raw_value}'")
            if value <= 0:
                raise NonPositivePrice(raw_date)
            rows.append((raw_date, value))

    rows.sort(key=lambda r: r[0])
    for (d1, _), (d2, _) in zip(rows, rows[1:]):
        if d1 == d2:
            raise DuplicateDate(d1)
    series = PriceSeries(
        dates=tuple(d for d, _ in rows),
        values=np.array([v for _, v in rows]),
        label=label or column,
    )
    return series.validate()


def log_returns(p: PriceSeries) -> ReturnSeries:
    """Log returns ln(P_t / P_{t-1}), dated by the later of each price pair."""
    if len(p) < 2:
        raise SeriesTooShort("need at least 2 prices to form returns")
    values = np.diff(np.log(p.values))
    return ReturnSeries(
        dates=tuple(p.dates[1:]),
        values=values,
        base_price=float(p.values[0]),
        label=p.label,
    )


def reconstruct_prices(r: ReturnSeries, anchor: float | None = None, label: str = "") -> PriceSeries:
    """Prices implied by compounding log returns from an anchor price.

    values[i] = anchor * exp(sum of returns up to and including i), the
    left inverse of :func:`log_returns` when anchored at the source's
    first price.
    """
    if anchor is None:
        anchor = r.base_price
    if not (anchor > 0 and math.isfinite(anchor)):
        raise NonPositivePrice("anchor")
    values = anchor * np.exp(np.cumsum(r.values))
    return PriceSeries(dates=r.dates, values=values, label=label or r.label)


def split(series, spec: SplitSpec):
    """Chronological split into (train, test) of a dated series.

    Works for both :class:`PriceSeries` and :class:`ReturnSeries`.  The
    test slice of a return series keeps a correct ``base_price`` (the
    price just before its first return) so reconstruction stays exact.
    """
    n = len(series)
    if spec.train_len + spec.test_len != n:
        raise LengthMismatch(
            f"split {spec.train_len}+{spec.test_len} does not match series length {n}"
        )
    k = spec.train_len
    if isinstance(series, ReturnSeries):
        train = ReturnSeries(series.dates[:k], series.values[:k],
                             series.base_price, series.label)
        test_base = series.base_price * math.exp(float(np.sum(series.values[:k])))
        test = ReturnSeries(series.dates[k:], series.values[k:],
                            test_base, series.label)
        return train, test
    train = PriceSeries(series.dates[:k], series.values[:k], series.label)
    test = PriceSeries(series.dates[k:], series.values[k:], series.label)
    return train, test
