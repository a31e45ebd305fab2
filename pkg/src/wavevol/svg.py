"""Minimal SVG heatmap of a scalogram's |W|^2.

Scale increases downward and time runs left to right. Columns are averaged
into at most ``max_columns`` blocks, colours come from a linear map clipped at
the largest valid-region value, and cone-of-influence cells are overlaid with
a hatch pattern. Output holds no timestamps, so it is deterministic.
"""
from __future__ import annotations

import numpy as np

from .wavelet import Scalogram

# anchor colours of a dark-to-bright linear ramp
_RAMP = np.array([
    (13, 8, 135), (84, 2, 163), (139, 10, 165), (185, 50, 137),
    (219, 92, 104), (244, 136, 73), (254, 188, 43), (240, 249, 33),
], dtype=float)
_LEVELS = 64


def _palette(levels: int = _LEVELS) -> list[str]:
    pos = np.linspace(0, len(_RAMP) - 1, levels)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, len(_RAMP) - 1)
    frac = (pos - lo)[:, None]
    rgb = np.rint(_RAMP[lo] * (1 - frac) + _RAMP[hi] * frac).astype(int)
    return ["#%02x%02x%02x" % tuple(c) for c in rgb]


def _runs(values):
    """(start, length, value) runs of equal neighbours."""
    start = 0
    for j in range(1, len(values) + 1):
        if j == len(values) or values[j] != values[start]:
            yield start, j - start, values[start]
            start = j


def scalogram_svg(s: Scalogram, max_columns: int = 512, cell_height: int = 4, cell_width: int = 2) -> str:
    rows, n = s.shape
    blocks = min(n, max_columns)
    edges = np.linspace(0, n, blocks + 1).astype(int)
    power = np.add.reduceat(s.squared, edges[:-1], axis=1) / np.diff(edges)
    valid = np.add.reduceat(s.valid_mask.astype(float), edges[:-1], axis=1) / np.diff(edges) >= 0.5

    ref = s.squared[s.valid_mask].max() if s.valid_mask.any() else s.squared.max()
    if ref > 0:
        level = np.minimum((power / ref * (_LEVELS - 1)).round().astype(int), _LEVELS - 1)
    else:
        level = np.zeros_like(power, dtype=int)
    colours = _palette()

    margin = 40
    width, height = blocks * cell_width, rows * cell_height
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + 2 * margin}" '
        f'height="{height + 2 * margin}" shape-rendering="crispEdges">',
        "<defs><pattern id=\"hatch\" width=\"4\" height=\"4\" patternUnits=\"userSpaceOnUse\">"
        "<path d=\"M0,4 L4,0\" stroke=\"#ffffff\" stroke-width=\"1\" stroke-opacity=\"0.7\"/></pattern></defs>",
        f'<title>{_escape(s.source_label or "scalogram")} |W|^2</title>',
        f'<g transform="translate({margin},{margin})">',
    ]
    for i in range(rows):
        y = i * cell_height
        for start, length, lv in _runs(level[i].tolist()):
            out.append(f'<rect x="{start * cell_width}" y="{y}" width="{length * cell_width}" '
                       f'height="{cell_height}" fill="{colours[lv]}"/>')
        for start, length, ok in _runs(valid[i].tolist()):
            if not ok:
                out.append(f'<rect x="{start * cell_width}" y="{y}" width="{length * cell_width}" '
                           f'height="{cell_height}" fill="url(#hatch)"/>')
    scales = s.grid.scales
    out.append(f'<text x="-4" y="{cell_height}" font-size="10" text-anchor="end">{scales[0]:g}</text>')
    out.append(f'<text x="-4" y="{height}" font-size="10" text-anchor="end">{scales[-1]:g}</text>')
    out.append(f'<text x="0" y="{height + 14}" font-size="10">0</text>')
    out.append(f'<text x="{width}" y="{height + 14}" font-size="10" text-anchor="end">{n - 1}</text>')
    out.append(f'<text x="{width / 2:g}" y="{height + 28}" font-size="11" text-anchor="middle">time index</text>')
    out.append(f'<text x="-28" y="{height / 2:g}" font-size="11" text-anchor="middle" '
               f'transform="rotate(-90 -28 {height / 2:g})">scale</text>')
    out.append("</g></svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
