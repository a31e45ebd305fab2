"""Rebuild the bundled daily FX snapshot under data/.

Source: the ECB euro foreign exchange reference rates history
(``eurofxref-hist.csv``) as redistributed inside the ``currencyconverter``
wheel. The ECB quotes units of foreign currency per 1 EUR, so

* US/EUR = USD per EUR (taken as published),
* US/UK  = USD per GBP, the cross rate USD/EUR divided by GBP/EUR,
* US/INR = INR per USD, the cross rate INR/EUR divided by USD/EUR.

The ECB only quotes INR from 2009-01-02, so the US/INR file starts there and
keeps the same number of rows as the other two files.

Rows are written oldest first in the ``YYYY-MM-DD,<value or ND>`` layout
read by :func:`wavevol.timeseries.parse_h10_csv`.

Usage::

    pip download --no-deps currencyconverter -d /tmp/cc
    python tools/make_fx_snapshot.py /tmp/cc/currencyconverter-*.whl
"""
import argparse
import csv
import io
import zipfile
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

START, END = "2000-01-03", "2009-03-09"
INR_START = "2009-01-02"


def read_ecb(wheel, start=START, end=END):
    with zipfile.ZipFile(wheel) as whl:
        name = next(n for n in whl.namelist() if n.endswith("eurofxref-hist.zip"))
        with zipfile.ZipFile(io.BytesIO(whl.read(name))) as inner:
            text = inner.read("eurofxref-hist.csv").decode("utf-8")
    rows = list(csv.DictReader(io.StringIO(text)))
    rows = [r for r in rows if start <= r["Date"] <= end]
    rows.sort(key=lambda r: r["Date"])
    return rows


def value(raw):
    raw = (raw or "").strip()
    return None if raw in ("", "N/A") else Decimal(raw)


def write(path, header, series):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"DATE,{header}\n")
        for date, v in series:
            fh.write(f"{date},{'ND' if v is None else v}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("wheel")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "data"))
    args = ap.parse_args()
    rows = read_ecb(args.wheel)
    out = Path(args.out)
    out.mkdir(exist_ok=True)

    eur = [(r["Date"], value(r["USD"])) for r in rows]
    write(out / "us_eur.csv", "USD_PER_EUR", eur)

    uk = []
    for r in rows:
        usd, gbp = value(r["USD"]), value(r["GBP"])
        if usd is None or gbp is None:
            uk.append((r["Date"], None))
        else:
            uk.append((r["Date"], (usd / gbp).quantize(Decimal("0.0001"), ROUND_HALF_EVEN)))
    write(out / "us_uk.csv", "USD_PER_GBP", uk)

    later = [r for r in read_ecb(args.wheel, INR_START, "9999-12-31") if value(r.get("INR"))][: len(rows)]
    inr = []
    for r in later:
        usd, rupee = value(r["USD"]), value(r["INR"])
        inr.append((r["Date"], None if usd is None else (rupee / usd).quantize(Decimal("0.0001"), ROUND_HALF_EVEN)))
    write(out / "us_inr.csv", "INR_PER_USD", inr)


if __name__ == "__main__":
    main()
