"""Deterministic synthetic series with known dynamics.

Randomness comes from the PCG64 bit generator seeded through numpy's
``SeedSequence`` (independent child streams are spawned per purpose).
Uniforms are built from the raw 64-bit output as ``(raw >> 11) * 2**-53`` and
normal variates by the Box-Muller pair method, so the result depends only on
the PCG64 integer stream and not on numpy's distribution samplers.
"""
from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadConfig

KINDS = ("gaussian_noise", "sine", "logistic_map", "vol_cluster")

DEFAULT_PARAMS = {
    "gaussian_noise": {"sigma": 1.0},
    "sine": {"period": 16.0, "amplitude": 1.0},
    "logistic_map": {"r": 4.0},
    "vol_cluster": {"switch_prob": 0.01, "vol_ratio": 5.0},
}


@dataclass(frozen=True)
class SynthSpec:
    kind: str
    length: int
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadConfig(f"unknown synthetic kind {self.kind!r}; expected one of {KINDS}")
        if int(self.length) != self.length or self.length < 64:
            raise BadConfig(f"synthetic length must be an integer >= 64, got {self.length!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise BadConfig("seed must be an unsigned 64-bit integer")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.kind]) - {"phase", "x0"}
        if unknown:
            raise BadConfig(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        p = self.resolved_params()
        if self.kind == "logistic_map":
            if not 0 < p["r"] <= 4:
                raise BadConfig("logistic r must lie in (0, 4]")
            if "x0" in p and not 0 < p["x0"] < 1:
                raise BadConfig("logistic x0 must lie in (0, 1)")
        elif self.kind == "sine":
            if p["period"] <= 0:
                raise BadConfig("sine period must be positive")
        elif self.kind == "vol_cluster":
            if not 0 < p["switch_prob"] < 1:
                raise BadConfig("switch_prob must lie in (0, 1)")
            if p["vol_ratio"] <= 0:
                raise BadConfig("vol_ratio must be positive")
        elif p["sigma"] <= 0:
            raise BadConfig("sigma must be positive")

    def resolved_params(self) -> dict:
        merged = dict(DEFAULT_PARAMS[self.kind])
        merged.update({k: float(v) for k, v in self.params.items()})
        return merged

    @property
    def label(self) -> str:
        extra = ",".join(f"{k}={v!r}" for k, v in sorted(self.params.items()))
        return f"{self.kind}(n={self.length},seed={self.seed}{',' + extra if extra else ''})"

    @classmethod
    def parse(cls, text: str) -> "SynthSpec":
        """Build a spec from ``kind=sine,length=4096,seed=3,period=32``."""
        fields = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            if "=" not in item:
                raise BadConfig(f"expected key=value, got {item!r}")
            k, v = (s.strip() for s in item.split("=", 1))
            fields[k] = v
        try:
            kind = fields.pop("kind")
            length = int(fields.pop("length", 4096))
            seed = int(fields.pop("seed", 0))
            params = {k: float(v) for k, v in fields.items()}
        except (KeyError, ValueError) as exc:
            raise BadConfig(f"bad synthetic spec {text!r}: {exc}") from None
        return cls(kind, length, seed, params)


def _streams(seed: int, count: int) -> list[np.random.PCG64]:
    return [np.random.PCG64(s) for s in np.random.SeedSequence(seed).spawn(count)]


def uniforms(bitgen: np.random.PCG64, n: int) -> np.ndarray:
    """``n`` doubles in [0, 1) from the top 53 bits of each raw draw."""
    raw = np.asarray(bitgen.random_raw(n), dtype=np.uint64)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def normals(bitgen: np.random.PCG64, n: int) -> np.ndarray:
    pairs = (n + 1) // 2
    u = uniforms(bitgen, 2 * pairs)
    out = np.empty(2 * pairs)
    for i in range(pairs):
        radius = math.sqrt(-2.0 * math.log(1.0 - u[2 * i]))
        angle = 2.0 * math.pi * u[2 * i + 1]
        out[2 * i] = radius * math.cos(angle)
        out[2 * i + 1] = radius * math.sin(angle)
    return out[:n]


def generate(spec: SynthSpec) -> np.ndarray:
    p = spec.resolved_params()
    n = spec.length
    main, aux = _streams(spec.seed, 2)

    if spec.kind == "gaussian_noise":
        return p["sigma"] * normals(main, n)

    if spec.kind == "sine":
        phase = p["phase"] if "phase" in p else 2 * math.pi * uniforms(main, 1)[0]
        period = p["period"]
        t = np.arange(n, dtype=float)
        if float(period).is_integer():
            # reduce first so equal residues give bit-identical values
            t = np.mod(t, period)
        return p["amplitude"] * np.sin(2 * np.pi * t / period + phase)

    if spec.kind == "logistic_map":
        r = p["r"]
        if "x0" in p:
            x = p["x0"]
        else:
            x = 0.05 + 0.9 * uniforms(main, 1)[0]
        out = np.empty(n)
        for i in range(n):
            out[i] = x
            x = r * x * (1.0 - x)
        return out

    # vol_cluster: Gaussian innovations scaled by a two-state Markov regime
    z = normals(main, n)
    u = uniforms(aux, n)
    state = 1 if u[0] < 0.5 else 0
    sigma = np.empty(n)
    for i in range(n):
        if i and u[i] < p["switch_prob"]:
            state = 1 - state
        sigma[i] = p["vol_ratio"] if state else 1.0
    return sigma * z


def business_days(n: int, start: dt.date = dt.date(2000, 1, 3)) -> list[dt.date]:
    days = []
    d = start
    while len(days) < n:
        if d.weekday() < 5:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def synthetic_prices(values, daily_vol: float = 0.01, start_price: float = 100.0) -> np.ndarray:
    """Price path whose log-returns are the standardised ``values`` times ``daily_vol``.

    Every detector is invariant to the affine map applied here, so analysing
    the price file is equivalent to analysing ``values`` directly.
    """
    values = np.asarray(values, dtype=float)
    sd = values.std()
    z = (values - values.mean()) / sd if sd > 0 else np.zeros_like(values)
    return start_price * np.exp(np.concatenate([[0.0], np.cumsum(daily_vol * z)]))
