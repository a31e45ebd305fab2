"""Command-line front end and end-to-end analysis pipeline.

Subcommands::

    wavevol analyze INPUT --out DIR [--config FILE] [--set KEY=VALUE ...]
    wavevol compare INPUT INPUT [...] --out DIR [--config FILE] [--set ...]
    wavevol synth --spec KIND_SPEC --out FILE
    wavevol spectrum INPUT --out FILE [--config FILE] [--set ...]
    wavevol version

``INPUT`` is a path to a dated price CSV or ``synth:<spec>`` such as
``synth:kind=sine,length=2048,seed=1``. Exit codes: 0 success, 2 usage,
3 data error, 4 numeric error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import shutil
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .chaosdetect import DynamicsReport, RidgeChain, analyze_dynamics, chains_to_csv
from .config import Config
from .errors import BadConfig, DataError, WavevolError
from .scalestats import KurtosisCurve, ScalePdf, gaussian_crossover, kurtosis, kurtosis_by_scale, scale_pdf, scale_series
from .spectral import Periodogram, periodogram, spectral_flatness
from .svg import scalogram_svg
from .synth import SynthSpec, business_days, generate, synthetic_prices
from .timeseries import PriceSeries, ReturnSeries, detrend, log_returns, read_h10_csv, to_h10_csv
from .wavelet import Scalogram, cwt, daubechies

SYNTH_PREFIX = "synth:"
ARTIFACTS = ("report.json", "kurtosis.csv", "scalogram.csv", "scalogram_mask.csv", "scalogram.svg",
             "periodogram.csv", "chains.csv", "pdf.csv", "config.used")


class UsageError(BadConfig):
    pass


@dataclass
class AnalysisReport:
    label: str
    source: str
    sample_span: dict
    spectral_flatness: float
    broad_band: bool
    crossover_scale: float | None
    kurtosis_curve: str
    omitted_scales: list
    pdf: dict
    dynamics: DynamicsReport
    config: Config
    version: str = __version__
    artifacts: list = field(default_factory=lambda: list(ARTIFACTS))

    @property
    def grade(self):
        return self.dynamics.grade

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "source": self.source,
            "sample_span": self.sample_span,
            "spectral_flatness": self.spectral_flatness,
            "broad_band": self.broad_band,
            "crossover_scale": self.crossover_scale,
            "kurtosis_curve": self.kurtosis_curve,
            "omitted_scales": self.omitted_scales,
            "pdf": self.pdf,
            "dynamics": _finite(self.dynamics.to_dict()),
            "config": self.config.as_dict(),
            "version": self.version,
            "artifacts": self.artifacts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@dataclass
class Analysis:
    report: AnalysisReport
    returns: ReturnSeries
    periodogram: Periodogram
    scalogram: Scalogram
    curve: KurtosisCurve
    chains: list[RidgeChain]
    pdf: ScalePdf

    def files(self) -> dict[str, str]:
        return {
            "report.json": self.report.to_json(),
            "kurtosis.csv": self.curve.to_csv(),
            "scalogram.csv": self.scalogram.to_csv(),
            "scalogram_mask.csv": self.scalogram.mask_to_csv(),
            "scalogram.svg": scalogram_svg(self.scalogram),
            "periodogram.csv": self.periodogram.to_csv(),
            "chains.csv": chains_to_csv(self.chains, self.scalogram.scales),
            "pdf.csv": self.pdf.to_csv(),
            "config.used": self.report.config.dumps(),
        }


def _finite(d: dict) -> dict:
    return {k: (None if isinstance(v, float) and not math.isfinite(v) else v) for k, v in d.items()}


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------

def load_prices(source: str, config: Config) -> PriceSeries:
    if source.startswith(SYNTH_PREFIX):
        spec = SynthSpec.parse(source[len(SYNTH_PREFIX):])
        prices = synthetic_prices(generate(spec))
        return PriceSeries(tuple(business_days(len(prices))), prices, label=spec.label)
    try:
        return read_h10_csv(source, config.gap_policy)
    except OSError as exc:
        raise DataError(f"cannot read {source}: {exc.strerror}") from None
    except (ValueError, UnicodeDecodeError) as exc:
        raise DataError(f"{source}: {exc}") from None


def load_returns(source: str, config: Config) -> ReturnSeries:
    r = log_returns(load_prices(source, config))
    if config.detrend_order >= 0:
        r = ReturnSeries(detrend(r.values, config.detrend_order), r.origin_dates, r.label)
    return r


def analyze_returns(r: ReturnSeries, config: Config, source: str = "") -> Analysis:
    x = np.asarray(r.values, dtype=float)
    pg = periodogram(x, config.window)
    flat = spectral_flatness(pg)

    spec = daubechies(config.wavelet_order, config.cascade_depth)
    grid = config.scale_grid()
    s = cwt(x, spec, grid, corrected=config.kernel_correction, label=r.label)

    curve = kurtosis_by_scale(s, config.stats_region)
    crossover = gaussian_crossover(curve, config.crossover_threshold, config.persistence)

    row = scale_series(s, config.pdf_scale, config.stats_region)
    pdf = scale_pdf(row, config.bin_rule, config.pdf_scale)
    try:
        pdf_kurtosis = kurtosis(row)
    except WavevolError:
        pdf_kurtosis = None

    sd = float(np.std(x))
    normalized = s if sd == 0 else Scalogram(s.coefficients / sd, s.valid_mask, grid, spec, r.label)
    dyn, chains = analyze_dynamics(
        s, normalized, min_prominence=config.prominence, link_radius=config.link_radius,
        window=config.shift_window, jump_fraction=config.jump_fraction, thresholds=config.thresholds())

    report = AnalysisReport(
        label=r.label,
        source=source,
        sample_span={
            "first_date": r.origin_dates[0].isoformat(),
            "last_date": r.origin_dates[-1].isoformat(),
            "returns": len(x),
        },
        spectral_flatness=flat,
        broad_band=flat > config.flatness_threshold,
        crossover_scale=crossover,
        kurtosis_curve="kurtosis.csv",
        omitted_scales=list(curve.omitted),
        pdf={"scale": config.pdf_scale, "kurtosis": pdf_kurtosis, "sample_count": pdf.sample_count,
             "bins": len(pdf.density), "file": "pdf.csv"},
        dynamics=dyn,
        config=config,
    )
    return Analysis(report, r, pg, s, curve, chains, pdf)


def _publish(files: dict[str, str], out_dir) -> None:
    """Write every file into a staging directory, then move them into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    stage = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.", dir=out_dir.parent))
    try:
        for name, text in files.items():
            target = stage / name
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text, encoding="utf-8", newline="\n")
        out_dir.mkdir(exist_ok=True)
        for name in files:
            (out_dir / name).parent.mkdir(parents=True, exist_ok=True)
            os.replace(stage / name, out_dir / name)
    finally:
        shutil.rmtree(stage, ignore_errors=True)


def run_analyze(source: str, config: Config = Config(), out_dir=None) -> AnalysisReport:
    analysis = analyze_returns(load_returns(source, config), config, source)
    files = analysis.files()
    if out_dir is not None:
        _publish(files, out_dir)
    return analysis.report


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_") or "input"


def comparison_csv(reports: list[AnalysisReport]) -> str:
    def key(r):
        f = r.dynamics.fragmentation_index
        return (0 if math.isfinite(f) else 1, -f if math.isfinite(f) else 0.0, r.label)

    rows = ["label,flatness,crossover,F,grade"]
    for r in sorted(reports, key=key):
        f = r.dynamics.fragmentation_index
        rows.append(",".join([
            r.label, repr(r.spectral_flatness),
            "" if r.crossover_scale is None else repr(r.crossover_scale),
            repr(f) if math.isfinite(f) else "", r.grade.label,
        ]))
    return "\n".join(rows) + "\n"


def run_compare(sources: list[str], config: Config = Config(), out_dir=None) -> tuple[list[AnalysisReport], str]:
    if len(sources) < 2:
        raise UsageError("compare needs at least two inputs")
    files, reports = {}, []
    for k, source in enumerate(sources):
        try:
            analysis = analyze_returns(load_returns(source, config), config, source)
        except WavevolError as exc:
            raise type(exc)(*_renamed_args(exc, source)) from None
        sub = f"{k:02d}_{_slug(analysis.report.label)}"
        files.update({f"{sub}/{name}": text for name, text in analysis.files().items()})
        reports.append(analysis.report)
    table = comparison_csv(reports)
    files["comparison.csv"] = table
    if out_dir is not None:
        _publish(files, out_dir)
    return reports, table


def _renamed_args(exc: WavevolError, source: str) -> tuple:
    args = list(exc.args) or [""]
    args[0] = f"{source}: {args[0]}"
    if hasattr(exc, "line"):
        return (exc.line, args[0])
    if hasattr(exc, "max_scale"):
        return (args[0], exc.max_scale)
    return tuple(args)


# --------------------------------------------------------------------------
# argument handling
# --------------------------------------------------------------------------

def _config_from_args(args) -> Config:
    base = Config.load(args.config) if args.config else Config()
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        overrides[k] = v
    if not overrides:
        return base
    merged = {k: str(v).lower() if isinstance(v, bool) else str(v) for k, v in base.as_dict().items()}
    merged.update(overrides)
    return Config.from_mapping(merged)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavevol", description=__doc__.split("\n\n")[0],
                                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="flat key = value configuration file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one configuration key")

    p = sub.add_parser("analyze", help="full analysis of one series", allow_abbrev=False)
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output directory")
    with_config(p)

    p = sub.add_parser("compare", help="analyse several series and rank them", allow_abbrev=False)
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True, help="output directory")
    with_config(p)

    p = sub.add_parser("synth", help="write a synthetic price file", allow_abbrev=False)
    p.add_argument("--spec", required=True, help="e.g. kind=logistic_map,length=4096,seed=1")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("spectrum", help="periodogram only", allow_abbrev=False)
    p.add_argument("input")
    p.add_argument("--out", required=True, help="output CSV path")
    with_config(p)

    sub.add_parser("version", help="print the version")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
            return 0
        if args.command == "synth":
            spec = SynthSpec.parse(args.spec)
            prices = synthetic_prices(generate(spec))
            _publish_file(to_h10_csv(business_days(len(prices)), prices, "PRICE"), args.out)
            return 0
        config = _config_from_args(args)
        if args.command == "analyze":
            report = run_analyze(args.input, config, args.out)
            d = report.dynamics
            print(f"{report.label}: crossover={report.crossover_scale} F={d.fragmentation_index:.4g} "
                  f"grade={d.grade.label} shift_regions={len(d.shift_regions)}")
        elif args.command == "compare":
            if len(args.inputs) < 2:
                parser.error("compare needs at least two inputs")
            _, table = run_compare(args.inputs, config, args.out)
            sys.stdout.write(table)
        elif args.command == "spectrum":
            r = load_returns(args.input, config)
            pg = periodogram(r.values, config.window)
            _publish_file(pg.to_csv(), args.out)
            print(f"{r.label}: spectral_flatness={spectral_flatness(pg):.6g}")
        return 0
    except WavevolError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


def _publish_file(text: str, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


if __name__ == "__main__":
    sys.exit(main())
