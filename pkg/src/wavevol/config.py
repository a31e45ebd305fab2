"""Flat ``key = value`` analysis configuration.

Every key has a default; a file only needs the keys it overrides. ``#`` starts
a comment. :meth:`Config.dumps` writes every key in sorted order, so the
written file is a complete snapshot that reproduces the run.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from .chaosdetect import GradeThresholds
from .errors import BadConfig, NumericError
from .scalestats import REGIONS, parse_bin_rule
from .spectral import Window
from .timeseries import GapPolicy
from .wavelet import MAX_ORDER, ScaleGrid


@dataclass(frozen=True)
class Config:
    wavelet_order: int = 7
    cascade_depth: int = 10
    normalization_p: float = 0.5
    kernel_correction: bool = True
    scale_min: float = 1.0
    scale_max: float = 128.0
    scale_step: float = 1.0
    crossover_threshold: float = 3.0
    persistence: int = 5
    stats_region: str = "full"
    bin_rule: str = "freedman_diaconis"
    pdf_scale: float = 10.0
    prominence: float = 0.01
    link_radius: float = 4.0
    shift_window: int = 64
    jump_fraction: float = 0.1
    grade_regular: float = 2.5
    grade_weak: float = 3.0
    grade_moderate: float = 3.5
    grade_reference_length: int = 1000
    activity_floor: float = 1e-10
    gap_policy: str = "drop"
    detrend_order: int = -1
    window: str = "none"
    flatness_threshold: float = 0.5

    def __post_init__(self):
        if not 1 <= self.wavelet_order <= MAX_ORDER:
            raise BadConfig(f"wavelet_order must lie in 1..{MAX_ORDER}")
        if not 4 <= self.cascade_depth <= 14:
            raise BadConfig("cascade_depth must lie in 4..14")
        if self.persistence < 1:
            raise BadConfig("persistence must be >= 1")
        if self.stats_region not in REGIONS:
            raise BadConfig(f"stats_region must be one of {REGIONS}")
        if self.prominence < 0:
            raise BadConfig("prominence must be non-negative")
        if self.link_radius < 1:
            raise BadConfig("link_radius must be >= 1")
        if self.shift_window < 8:
            raise BadConfig("shift_window must be >= 8")
        if not 0 < self.jump_fraction < 1:
            raise BadConfig("jump_fraction must lie in (0, 1)")
        if self.detrend_order not in (-1, 0, 1):
            raise BadConfig("detrend_order must be -1 (off), 0 or 1")
        if self.pdf_scale < 1:
            raise BadConfig("pdf_scale must be >= 1")
        try:
            parse_bin_rule(self.bin_rule)
            GapPolicy(self.gap_policy)
            Window(self.window)
            self.scale_grid().index(self.pdf_scale)
        except (ValueError, NumericError) as exc:
            raise BadConfig(str(exc)) from None
        self.thresholds()

    def scale_grid(self) -> ScaleGrid:
        if self.scale_step <= 0 or self.scale_max < self.scale_min:
            raise BadConfig("scale grid needs scale_step > 0 and scale_max >= scale_min")
        return ScaleGrid.linear(self.scale_min, self.scale_max, self.scale_step, self.normalization_p)

    def thresholds(self) -> GradeThresholds:
        return GradeThresholds(self.grade_regular, self.grade_weak, self.grade_moderate,
                               self.activity_floor, self.grade_reference_length)

    def as_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        lines = []
        for k, v in sorted(self.as_dict().items()):
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def updated(self, **changes) -> "Config":
        return replace(self, **changes)

    @classmethod
    def loads(cls, text: str) -> "Config":
        return cls.from_mapping(parse_pairs(text))

    @classmethod
    def from_mapping(cls, pairs: dict[str, str]) -> "Config":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in pairs.items():
            if key not in types:
                raise BadConfig(f"unknown configuration key {key!r}")
            values[key] = _coerce(key, raw, types[key])
        return cls(**values)

    @classmethod
    def load(cls, path) -> "Config":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.loads(fh.read())
        except OSError as exc:
            raise BadConfig(f"cannot read configuration {path}: {exc.strerror}") from None


def parse_pairs(text: str) -> dict[str, str]:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadConfig(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in pairs:
            raise BadConfig(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _coerce(key: str, raw: str, kind: str):
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in ("true", "false"):
                raise ValueError(raw)
            return low == "true"
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise BadConfig(f"{key}: cannot read {raw!r} as {kind}") from None
