"""Per-scale coefficient statistics: PDFs, kurtosis against scale, Gaussian crossover.

Kurtosis curves are taken over whole coefficient rows by default
(``region="full"``, zero-padded edges included); ``region="valid"`` restricts
every row to the cone-of-influence interior. Single-scale series default to
the valid interior.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistribution, NoUsableScales, TooShort
from .wavelet import Scalogram

REGIONS = ("full", "valid")


class EmptyRow(UserWarning):
    """A requested scale has no coefficients left after masking."""


@dataclass(frozen=True)
class ScalePdf:
    scale: float | None
    bin_edges: np.ndarray
    density: np.ndarray
    sample_count: int

    def to_csv(self) -> str:
        rows = ["bin_left,bin_right,density"]
        edges = self.bin_edges.tolist()
        for left, right, d in zip(edges[:-1], edges[1:], self.density.tolist()):
            rows.append(f"{left!r},{right!r},{d!r}")
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class KurtosisCurve:
    scales: np.ndarray
    kurtosis: np.ndarray
    sample_counts: np.ndarray
    omitted: tuple[float, ...] = field(default=())

    def to_csv(self) -> str:
        rows = ["scale,kurtosis,n"]
        for a, k, n in zip(self.scales.tolist(), self.kurtosis.tolist(), self.sample_counts.tolist()):
            rows.append(f"{a!r},{k!r},{n}")
        return "\n".join(rows) + "\n"


def _check_region(region):
    if region not in REGIONS:
        raise ValueError(f"region must be one of {REGIONS}, got {region!r}")


def scale_series(s: Scalogram, a: float, region: str = "valid") -> np.ndarray:
    """Coefficient row at scale ``a`` in time order, optionally masked to the valid region."""
    _check_region(region)
    i = s.grid.index(a)
    row = s.coefficients[i]
    if region == "valid":
        row = row[s.valid_mask[i]]
        if row.size == 0:
            warnings.warn(f"scale {a!r} has no valid coefficients", EmptyRow, stacklevel=2)
    return row.copy()


def _fd_bins(x: np.ndarray) -> int:
    q75, q25 = np.percentile(x, [75, 25])
    iqr = q75 - q25
    span = x.max() - x.min()
    if iqr <= 0 or span <= 0:
        return 1
    width = 2 * iqr / len(x) ** (1 / 3)
    return max(1, int(np.ceil(span / width)))


def scale_pdf(x, bin_rule: str | int = "freedman_diaconis", scale: float | None = None) -> ScalePdf:
    """Normalised histogram of a coefficient series.

    ``bin_rule`` is ``"freedman_diaconis"`` or a fixed bin count (an int, or a
    string such as ``"fixed(40)"``).
    """
    x = np.asarray(x, dtype=float)
    if len(x) < 32:
        raise TooShort(f"a PDF needs at least 32 samples, got {len(x)}")
    bins = parse_bin_rule(bin_rule)
    if bins is None:
        bins = _fd_bins(x)
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        # a point mass gets one unit-width bin around it
        lo, hi = lo - 0.5, hi + 0.5
        bins = 1
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    density = counts / (len(x) * np.diff(edges))
    return ScalePdf(scale, edges, density, len(x))


def parse_bin_rule(rule) -> int | None:
    if isinstance(rule, (int, np.integer)):
        if rule < 1:
            raise ValueError("fixed bin count must be positive")
        return int(rule)
    text = str(rule).strip().lower()
    if text in ("freedman_diaconis", "fd"):
        return None
    if text.startswith("fixed(") and text.endswith(")"):
        return parse_bin_rule(int(text[6:-1]))
    raise ValueError(f"unknown bin rule {rule!r}")


def kurtosis(x) -> float:
    """Plain moment kurtosis ``m4 / m2**2`` (Gaussian = 3, no bias correction)."""
    x = np.asarray(x, dtype=float)
    if len(x) < 4:
        raise TooShort(f"kurtosis needs at least 4 samples, got {len(x)}")
    d = x - x.mean()
    m2 = np.mean(d**2)
    # rounding in the mean of a constant series leaves m2 ~ eps**2, not 0
    if m2 == 0 or m2 <= (1e-12 * np.max(np.abs(x))) ** 2:
        raise DegenerateDistribution("zero variance")
    # the ratio is scale free; normalising first avoids under/overflow in d**4
    z = d / np.max(np.abs(d))
    return float(np.mean(z**4) / np.mean(z**2) ** 2)


def kurtosis_by_scale(s: Scalogram, region: str = "full") -> KurtosisCurve:
    _check_region(region)
    scales, values, counts, omitted = [], [], [], []
    for i, a in enumerate(s.grid.scales.tolist()):
        row = s.coefficients[i]
        if region == "valid":
            row = row[s.valid_mask[i]]
        try:
            k = kurtosis(row)
        except (TooShort, DegenerateDistribution):
            omitted.append(a)
            continue
        scales.append(a)
        values.append(k)
        counts.append(len(row))
    if not scales:
        raise NoUsableScales("every scale row is degenerate or too short")
    return KurtosisCurve(np.array(scales), np.array(values), np.array(counts), tuple(omitted))


def gaussian_crossover(c: KurtosisCurve, threshold: float = 3.0, persistence: int = 5) -> float | None:
    """First scale from which kurtosis stays below ``threshold`` for ``persistence`` grid scales."""
    if len(c.kurtosis) == 0:
        raise ValueError("empty kurtosis curve")
    if persistence < 1:
        raise ValueError("persistence must be >= 1")
    below = np.asarray(c.kurtosis) < threshold
    run = 0
    for i, b in enumerate(below):
        run = run + 1 if b else 0
        if run == persistence:
            return float(c.scales[i - persistence + 1])
    return None


def median_smooth(values, width: int = 5) -> np.ndarray:
    """Running median with the window shrunk at the ends."""
    values = np.asarray(values, dtype=float)
    half = width // 2
    return np.array([np.median(values[max(0, i - half): i + half + 1]) for i in range(len(values))])
