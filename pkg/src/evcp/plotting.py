"""Dependency-free SVG output: placement scatter plots and fitness curves.

Point markers are ``<circle>`` elements, one per POI / old charger / new
charger; legend swatches are ``<rect>`` so marker counts stay exact.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape

from .instance import GridInstance
from .scoring import Placement

POI_COLOR = "#1f4fd1"
OLD_COLOR = "#d12a1f"
NEW_COLOR = "#1f9d3a"
CURVE_COLORS = ("#1f4fd1", "#d12a1f", "#1f9d3a", "#8c4fd1", "#d18c1f")

_MARGIN = 40
_LEGEND_W = 150


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def placement_svg(
    inst: GridInstance,
    placement: Placement,
    title: str | None = None,
    cell: float = 24.0,
) -> str:
    span_x = max(inst.width - 1, 1)
    span_y = max(inst.height - 1, 1)
    cell = min(cell, 600.0 / max(span_x, span_y))
    w = span_x * cell + 2 * _MARGIN + _LEGEND_W
    h = span_y * cell + 2 * _MARGIN
    r = max(2.5, min(6.0, cell / 3))

    def xy(x, y):
        # y grows upward on the plot
        return _fmt(_MARGIN + x * cell), _fmt(_MARGIN + (span_y - y) * cell)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_fmt(span_x * cell)}" '
        f'height="{_fmt(span_y * cell)}" fill="none" stroke="#999" stroke-width="1"/>',
    ]
    if title:
        out.append(
            f'<text x="{_MARGIN}" y="{_MARGIN // 2 + 5}" font-family="sans-serif" '
            f'font-size="14">{escape(title)}</text>'
        )
    groups = (
        ("poi", POI_COLOR, inst.pois),
        ("old-charger", OLD_COLOR, inst.old_chargers),
        ("new-charger", NEW_COLOR, placement.coords),
    )
    for cls, color, pts in groups:
        out.append(f'<g class="{cls}" fill="{color}">')
        for x, y in pts:
            cx, cy = xy(x, y)
            out.append(f'<circle cx="{cx}" cy="{cy}" r="{_fmt(r)}"/>')
        out.append("</g>")
    lx = _MARGIN + span_x * cell + 20
    labels = (("POI", POI_COLOR), ("old charger", OLD_COLOR), ("new charger", NEW_COLOR))
    for k, (label, color) in enumerate(labels):
        ly = _MARGIN + 20 * k
        out.append(f'<rect x="{_fmt(lx)}" y="{ly}" width="10" height="10" fill="{color}"/>')
        out.append(
            f'<text x="{_fmt(lx + 16)}" y="{ly + 10}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def curves_svg(
    curves: Mapping[str, Sequence[float]],
    title: str | None = None,
    width: float = 640.0,
    height: float = 360.0,
) -> str:
    """Best fitness against generation, one polyline per named curve."""
    series = {k: list(v) for k, v in curves.items() if len(v)}
    if not series:
        raise ValueError("no curves to plot")
    n = max(len(v) for v in series.values())
    lo = min(min(v) for v in series.values())
    hi = max(max(v) for v in series.values())
    if hi == lo:
        hi = lo + 1.0
    pw = width - 2 * _MARGIN - _LEGEND_W
    ph = height - 2 * _MARGIN

    def xy(g, f):
        x = _MARGIN + pw * (g / max(n - 1, 1))
        y = _MARGIN + ph * (1 - (f - lo) / (hi - lo))
        return f"{_fmt(x)},{_fmt(y)}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<rect x="0" y="0" width="{_fmt(width)}" height="{_fmt(height)}" fill="white"/>',
        f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_fmt(pw)}" height="{_fmt(ph)}" '
        f'fill="none" stroke="#999"/>',
        f'<text x="{_MARGIN}" y="{_fmt(height - 10)}" font-family="sans-serif" '
        f'font-size="11">generation 0..{n - 1}; best fitness {_fmt(lo)}..{_fmt(hi)}</text>',
    ]
    if title:
        out.append(
            f'<text x="{_MARGIN}" y="{_MARGIN // 2 + 5}" font-family="sans-serif" '
            f'font-size="14">{escape(title)}</text>'
        )
    for k, (name, vals) in enumerate(series.items()):
        color = CURVE_COLORS[k % len(CURVE_COLORS)]
        pts = " ".join(xy(g, f) for g, f in enumerate(vals))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = _MARGIN + 20 * k
        lx = _MARGIN + pw + 20
        out.append(f'<rect x="{_fmt(lx)}" y="{ly}" width="10" height="10" fill="{color}"/>')
        out.append(
            f'<text x="{_fmt(lx + 16)}" y="{ly + 10}" font-family="sans-serif" '
            f'font-size="12">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(text: str, path: str | Path) -> None:
    Path(path).write_text(text, encoding="utf-8")
