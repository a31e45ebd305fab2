import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import direct_dft_power
from wavevol.errors import TooShort, Undefined
from wavevol.spectral import Periodogram, Window, periodogram, spectral_flatness
from wavevol.synth import SynthSpec, generate

EULER_GAMMA = 0.5772156649015329


def _noise(n, seed):
    return generate(SynthSpec("gaussian_noise", n, seed))


def test_single_bin_cosine():
    t = np.arange(64)
    p = periodogram(np.cos(2 * np.pi * t * 8 / 64))
    peak = int(np.argmax(p.power))
    assert p.frequencies[peak] == 8 / 64
    others = np.delete(p.power, peak)
    assert np.all(others < 1e-10 * p.power[peak])
    # a unit cosine puts L/4 in its bin
    assert p.power[peak] == pytest.approx(16.0, rel=1e-12)


def test_zero_signal():
    p = periodogram(np.zeros(32))
    assert np.all(p.power == 0)


def test_invariants():
    p = periodogram(_noise(101, 1), "hann")
    assert len(p.frequencies) == len(p.power) == 51
    assert np.all(np.diff(p.frequencies) > 0)
    assert p.frequencies[0] == 0 and p.frequencies[-1] <= 0.5
    assert np.all(p.power >= 0)
    assert p.window is Window.HANN


def test_too_short():
    with pytest.raises(TooShort):
        periodogram(np.ones(7))


@pytest.mark.parametrize("n", [64, 257, 512])
def test_matches_direct_dft(n):
    x = _noise(n, 3)
    p = periodogram(x)
    expected = direct_dft_power(x - x.mean())
    assert np.allclose(p.power, expected, rtol=1e-9, atol=1e-9 * expected.max())


@pytest.mark.parametrize("window", ["none", "hann"])
def test_parseval_white_noise(window):
    x = _noise(4096, 11)
    p = periodogram(x, window)
    w = np.ones(4096) if window == "none" else 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(4096) / 4096)
    xw = w * (x - x.mean())
    energy = math.fsum(xw**2)
    assert p.total_power() == pytest.approx(energy, rel=1e-8)
    # same relation through the explicit-summation DFT
    direct = direct_dft_power(xw)
    weights = np.full(len(direct), 2.0)
    weights[0] = weights[-1] = 1.0
    assert math.fsum(weights * direct) == pytest.approx(energy, rel=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-20, 20))
def test_power_scales_exactly_by_powers_of_two(seed, e):
    x = _noise(64, seed)
    c = 2.0**e
    assert np.array_equal(periodogram(c * x).power, c * c * periodogram(x).power)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_power_scales_quadratically(seed, c):
    x = _noise(64, seed)
    base = periodogram(x).power
    assert np.allclose(periodogram(c * x).power, c * c * base, rtol=1e-12, atol=1e-12 * c * c * base.max())


def test_csv_layout():
    text = periodogram(np.arange(8.0)).to_csv()
    lines = text.splitlines()
    assert lines[0] == "frequency,power"
    assert len(lines) == 6


class TestFlatness:
    def _pg(self, power):
        power = np.asarray(power, dtype=float)
        n = 2 * (len(power) - 1)
        return Periodogram(np.arange(len(power)) / n, power, Window.NONE, n)

    def test_flat(self):
        assert spectral_flatness(self._pg([0.0] + [2.5] * 20)) == pytest.approx(1.0, abs=1e-15)

    def test_single_line(self):
        power = np.zeros(33)
        power[7] = 4.0
        assert spectral_flatness(self._pg(power)) == 0.0

    def test_all_zero(self):
        with pytest.raises(Undefined):
            spectral_flatness(self._pg(np.zeros(9)))

    def test_dc_excluded(self):
        assert spectral_flatness(self._pg([1e6, 1.0, 1.0, 1.0])) == pytest.approx(1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-6, 1e6), min_size=2, max_size=40), st.floats(1e-6, 1e6))
    def test_scale_invariant(self, power, c):
        base = spectral_flatness(self._pg([0.0] + power))
        scaled = spectral_flatness(self._pg([0.0] + [c * v for v in power]))
        assert 0.0 <= base <= 1.0
        assert scaled == pytest.approx(base, rel=1e-9, abs=1e-12)

    def test_white_noise_near_exponential_limit(self):
        # periodogram bins of white noise are asymptotically exponential, for
        # which the geometric/arithmetic mean ratio is exp(-gamma)
        values = [spectral_flatness(periodogram(_noise(8192, s))) for s in range(5)]
        assert all(v > 0.5 for v in values)
        assert np.mean(values) == pytest.approx(math.exp(-EULER_GAMMA), abs=0.02)
