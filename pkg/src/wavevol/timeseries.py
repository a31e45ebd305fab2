"""Daily exchange-rate ingestion and log-returns.

Input files follow the Federal Reserve H.10 download layout: one header line,
then ``YYYY-MM-DD,<value>`` rows where the value may be a missing-data marker
(``ND``, ``.`` or empty). Weekends and holidays are not reconstructed; the
series is indexed by trading day.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import MalformedRow, NoData, TooShort

MISSING_MARKERS = frozenset({"ND", ".", ""})


class GapPolicy(str, Enum):
    DROP = "drop"
    FORWARD_FILL = "forward_fill"


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[dt.date, ...]
    prices: np.ndarray
    gap_policy: GapPolicy = GapPolicy.DROP
    label: str = ""

    def __post_init__(self):
        if len(self.dates) != len(self.prices):
            raise ValueError("dates and prices differ in length")
        if len(self.prices) < 2:
            raise TooShort(f"price series needs at least 2 observations, got {len(self.prices)}")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")
        if not np.all(self.prices > 0):
            raise ValueError("prices must be positive")

    def __len__(self):
        return len(self.prices)


@dataclass(frozen=True)
class ReturnSeries:
    values: np.ndarray
    origin_dates: tuple[dt.date, ...]
    label: str = ""

    def __len__(self):
        return len(self.values)


def parse_h10_csv(raw: str, gap_policy: GapPolicy | str = GapPolicy.DROP, label: str = "") -> PriceSeries:
    """Parse H.10-style CSV text into a :class:`PriceSeries`.

    Rows before the first valid price are always dropped, so forward filling
    never needs a value that does not exist.
    """
    gap_policy = GapPolicy(gap_policy)
    lines = raw.splitlines()
    dates: list[dt.date] = []
    prices: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) < 2:
            parts.append("")
        date_text, value_text = parts[0], parts[1]
        try:
            date = dt.date.fromisoformat(date_text)
        except ValueError:
            raise MalformedRow(lineno, f"unparseable date {date_text!r}") from None
        if dates and date <= dates[-1]:
            raise MalformedRow(lineno, f"date {date_text} is not after {dates[-1]}")

        if value_text.upper() in MISSING_MARKERS:
            if gap_policy is GapPolicy.FORWARD_FILL and prices:
                dates.append(date)
                prices.append(prices[-1])
            continue
        try:
            price = float(value_text)
        except ValueError:
            raise MalformedRow(lineno, f"unparseable value {value_text!r}") from None
        if not math.isfinite(price) or price <= 0:
            raise MalformedRow(lineno, f"price must be positive, got {value_text}")
        dates.append(date)
        prices.append(price)

    if not prices:
        raise NoData("no valid observations after removing missing-data rows")
    return PriceSeries(tuple(dates), np.asarray(prices, dtype=float), gap_policy, label)


def read_h10_csv(path, gap_policy: GapPolicy | str = GapPolicy.DROP, label: str | None = None) -> PriceSeries:
    from pathlib import Path

    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = fh.read()
    return parse_h10_csv(raw, gap_policy, label if label is not None else path.stem)


def log_returns(p: PriceSeries) -> ReturnSeries:
    if len(p.prices) < 2:
        raise TooShort("log returns need at least 2 prices")
    values = np.diff(np.log(p.prices))
    return ReturnSeries(values, tuple(p.dates[1:]), p.label)


def detrend(x, order: int = 0) -> np.ndarray:
    """Subtract the least-squares polynomial of degree ``order`` (0 or 1)."""
    if order not in (0, 1):
        raise ValueError("detrend order must be 0 or 1")
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n <= order + 1:
        raise TooShort(f"detrend of order {order} needs more than {order + 1} samples")
    if order == 0:
        return x - x.mean()
    # centred abscissa keeps the normal equations well conditioned
    t = np.arange(n) - (n - 1) / 2
    slope = np.dot(t, x) / np.dot(t, t)
    return x - x.mean() - slope * t


def to_h10_csv(dates, values, header: str = "VALUE") -> str:
    """Render a dated series in the same layout :func:`parse_h10_csv` reads."""
    out = [f"DATE,{header}"]
    out.extend(f"{d.isoformat()},{float(v)!r}" for d, v in zip(dates, values))
    return "\n".join(out) + "\n"
