import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import DATA, lstsq_detrend, log_ratio
from wavevol.errors import MalformedRow, NoData, TooShort
from wavevol.timeseries import (GapPolicy, PriceSeries, detrend, log_returns, parse_h10_csv,
                                read_h10_csv, to_h10_csv)

THREE_ROWS = "DATE,RATE\n2000-01-03,0.9423\n2000-01-04,ND\n2000-01-05,0.9472\n"


def _series(prices):
    start = dt.date(2000, 1, 3)
    dates = tuple(start + dt.timedelta(days=i) for i in range(len(prices)))
    return PriceSeries(dates, np.asarray(prices, dtype=float))


class TestParse:
    def test_drop_removes_marker_row(self):
        p = parse_h10_csv(THREE_ROWS, GapPolicy.DROP)
        assert len(p) == 2
        assert p.dates == (dt.date(2000, 1, 3), dt.date(2000, 1, 5))

    def test_forward_fill_reuses_previous_price(self):
        p = parse_h10_csv(THREE_ROWS, "forward_fill")
        assert len(p) == 3
        assert p.prices[1] == 0.9423
        assert p.gap_policy is GapPolicy.FORWARD_FILL

    def test_only_missing_rows(self):
        with pytest.raises(NoData):
            parse_h10_csv("DATE,RATE\n2000-01-03,ND\n2000-01-04,ND\n")

    @pytest.mark.parametrize("marker", ["ND", ".", ""])
    def test_leading_missing_rows_dropped_even_when_filling(self, marker):
        raw = f"DATE,RATE\n2000-01-03,{marker}\n2000-01-04,1.5\n2000-01-05,{marker}\n2000-01-06,1.6\n"
        p = parse_h10_csv(raw, GapPolicy.FORWARD_FILL)
        assert p.dates[0] == dt.date(2000, 1, 4)
        assert p.prices.tolist() == [1.5, 1.5, 1.6]

    @pytest.mark.parametrize("row, line", [
        ("2000-13-01,1.0", 3),
        ("2000-01-05,-1.0", 3),
        ("2000-01-05,0", 3),
        ("2000-01-05,abc", 3),
        ("2000-01-03,1.0", 3),
    ])
    def test_malformed_rows_report_line(self, row, line):
        raw = f"DATE,RATE\n2000-01-03,1.0\n{row}\n"
        with pytest.raises(MalformedRow) as err:
            parse_h10_csv(raw)
        assert err.value.line == line

    def test_blank_lines_ignored(self):
        p = parse_h10_csv("DATE,RATE\n\n2000-01-03,1.0\n\n2000-01-04,2.0\n")
        assert len(p) == 2

    def test_round_trip(self):
        p = parse_h10_csv(THREE_ROWS)
        again = parse_h10_csv(to_h10_csv(p.dates, p.prices))
        assert again.dates == p.dates
        assert np.array_equal(again.prices, p.prices)

    def test_price_series_invariants(self):
        with pytest.raises(TooShort):
            _series([1.0])
        with pytest.raises(ValueError):
            PriceSeries((dt.date(2000, 1, 2), dt.date(2000, 1, 1)), np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            _series([1.0, 0.0])


@pytest.mark.parametrize("name", ["us_eur", "us_uk", "us_inr"])
def test_bundled_snapshots_parse(name):
    p = read_h10_csv(DATA / f"{name}.csv")
    assert p.label == name
    assert len(p) == 2348
    r = log_returns(p)
    assert len(r) == len(p) - 1
    assert np.all(np.isfinite(r.values))


def test_bundled_span():
    p = read_h10_csv(DATA / "us_eur.csv")
    assert p.dates[0] == dt.date(2000, 1, 3)
    assert p.dates[-1] == dt.date(2009, 3, 9)


class TestLogReturns:
    def test_constant(self):
        assert log_returns(_series([100, 100, 100])).values.tolist() == [0.0, 0.0]

    def test_e(self):
        assert log_returns(_series([1.0, math.e])).values[0] == pytest.approx(1.0, abs=1e-15)

    def test_against_arbitrary_precision(self):
        value = log_returns(_series([0.9423, 0.9472])).values[0]
        expected = log_ratio("0.9423", "0.9472")
        assert expected == pytest.approx(0.0051865689, abs=1e-10)
        assert value == pytest.approx(expected, rel=1e-12)

    def test_origin_dates_are_numerators(self):
        p = parse_h10_csv(THREE_ROWS)
        assert log_returns(p).origin_dates == (dt.date(2000, 1, 5),)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 1e4), min_size=2, max_size=60), st.floats(1e-3, 1e3))
    def test_scale_invariance(self, prices, c):
        a = log_returns(_series(prices)).values
        b = log_returns(_series([c * p for p in prices])).values
        assert np.allclose(a, b, rtol=0, atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0.01, 1e4), min_size=2, max_size=200))
    def test_sum_telescopes(self, prices):
        r = log_returns(_series(prices)).values
        total = math.log(prices[-1] / prices[0])
        assert math.fsum(r) == pytest.approx(total, rel=1e-10, abs=1e-12)


class TestDetrend:
    def test_constant(self):
        assert detrend([5, 5, 5, 5], 0).tolist() == [0, 0, 0, 0]

    def test_line(self):
        assert np.max(np.abs(detrend([1, 2, 3, 4], 1))) < 1e-12

    @pytest.mark.parametrize("order", [0, 1])
    def test_matches_least_squares(self, order):
        x = np.random.default_rng(5).standard_normal(1000) + 0.01 * np.arange(1000)
        d = detrend(x, order)
        assert abs(d.mean()) < 1e-10 * np.max(np.abs(x))
        assert np.allclose(d, lstsq_detrend(x, order), rtol=0, atol=1e-10)

    def test_too_short(self):
        with pytest.raises(TooShort):
            detrend([1.0, 2.0], 1)
        with pytest.raises(ValueError):
            detrend([1.0, 2.0, 3.0], 2)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=100), st.sampled_from([0, 1]))
    def test_idempotent(self, x, order):
        once = detrend(x, order)
        assert np.allclose(detrend(once, order), once, rtol=0, atol=1e-10 * max(1.0, np.max(np.abs(x))))
