"""One-sided periodogram and spectral flatness."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TooShort, Undefined


class Window(str, Enum):
    NONE = "none"
    HANN = "hann"


@dataclass(frozen=True)
class Periodogram:
    """Power at frequencies ``k / L`` cycles per sample, ``k = 0 .. L // 2``."""

    frequencies: np.ndarray
    power: np.ndarray
    window: Window
    length: int

    def total_power(self) -> float:
        """Two-sided power sum; equals ``sum((w * x) ** 2)`` by Parseval."""
        weights = np.full(len(self.power), 2.0)
        weights[0] = 1.0
        if self.length % 2 == 0:
            weights[-1] = 1.0
        return float(np.dot(weights, self.power))

    def to_csv(self) -> str:
        rows = ["frequency,power"]
        rows.extend(f"{f!r},{p!r}" for f, p in zip(self.frequencies.tolist(), self.power.tolist()))
        return "\n".join(rows) + "\n"


def _window(kind: Window, n: int) -> np.ndarray:
    if kind is Window.NONE:
        return np.ones(n)
    # periodic Hann
    return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)


def periodogram(x, window: Window | str = Window.NONE) -> Periodogram:
    """``power[k] = |DFT(w * (x - mean(x)))[k]|**2 / L`` for the non-negative frequencies."""
    window = Window(window)
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 8:
        raise TooShort(f"periodogram needs at least 8 samples, got {n}")
    xw = _window(window, n) * (x - x.mean())
    spec = np.fft.rfft(xw)
    power = (spec.real**2 + spec.imag**2) / n
    freqs = np.arange(len(power)) / n
    return Periodogram(freqs, power, window, n)


def spectral_flatness(p: Periodogram) -> float:
    """Geometric over arithmetic mean of the positive-frequency bins.

    Empty bins drive the geometric mean to zero, so a single spectral line
    scores 0 and a perfectly flat spectrum scores 1.
    """
    power = np.asarray(p.power[1:], dtype=float)
    if power.size == 0 or not np.any(power > 0):
        raise Undefined("spectral flatness is undefined for an all-zero spectrum")
    arith = power.mean()
    if np.any(power <= 0):
        return 0.0
    # normalise before the log-mean so the ratio is exactly scale invariant
    geo = np.exp(np.mean(np.log(power / arith)))
    return float(min(geo, 1.0))
