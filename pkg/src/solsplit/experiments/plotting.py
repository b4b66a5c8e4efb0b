"""Deterministic standalone SVG rendering of experiment CSV files.

No plotting library: the renderer maps data to a fixed 640x480 viewport
with fixed-precision coordinates, so identical inputs produce
byte-identical files.  Series come from declared CSV columns, optionally
split by a group column; horizontal dashed reference lines mark
theoretical asymptotes.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

__all__ = ["PlotSpec", "emit_plot"]

_WIDTH, _HEIGHT = 640.0, 480.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 72.0, 26.0, 42.0, 56.0
_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


@dataclass(frozen=True)
class PlotSpec:
    """What to draw from a CSV file and where to write the SVG."""

    x_column: str
    y_columns: tuple[str, ...]
    out_path: str
    group_column: str | None = None
    reference_lines: tuple[float, ...] = field(default=())
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    log_x: bool = False
    log_y: bool = False


def _coord(value: float) -> str:
    return f"{value:.2f}"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _load_rows(csv_path: str, spec: PlotSpec) -> list[dict[str, str]]:
    with open(csv_path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        names = reader.fieldnames
        rows = list(reader)
    if names is not None:
        needed = [spec.x_column, *spec.y_columns]
        if spec.group_column is not None:
            needed.append(spec.group_column)
        for column in needed:
            if column not in names:
                raise ValueError(f"missing column {column!r} in {csv_path}")
    return rows


def _collect_series(
    rows: list[dict[str, str]], spec: PlotSpec
) -> list[tuple[str, list[tuple[float, float]]]]:
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        try:
            x = float(row[spec.x_column])
        except ValueError:
            continue
        for column in spec.y_columns:
            try:
                y = float(row[column])
            except ValueError:
                continue
            if not (math.isfinite(x) and math.isfinite(y)):
                continue
            if spec.log_x and x <= 0 or spec.log_y and y <= 0:
                continue
            label = column
            if spec.group_column is not None:
                raw = row[spec.group_column]
                try:
                    tag = f"{float(raw):.6g}"
                except ValueError:
                    tag = raw
                label = f"{spec.group_column}={tag}"
                if len(spec.y_columns) > 1:
                    label += f" {column}"
            series.setdefault(label, []).append((x, y))
    out = [(label, sorted(points)) for label, points in series.items()]
    out.sort()
    return out


def _axis_range(values: list[float], log_scale: bool) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if log_scale:
        lo, hi = math.log10(lo), math.log10(hi)
    if hi - lo < 1e-12:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.06 * (hi - lo)
    return lo - pad, hi + pad


def _project(value: float, log_scale: bool) -> float:
    return math.log10(value) if log_scale else value


def emit_plot(csv_path: str, spec: PlotSpec) -> str:
    """Render one CSV file to a standalone SVG; returns the output path.

    Raises ValueError when a declared column is missing.  A CSV without
    data rows produces an axes-only figure and a warning, not an error.
    """
    rows = _load_rows(csv_path, spec)
    series = _collect_series(rows, spec)
    if not series:
        warnings.warn(f"no plottable rows in {csv_path}; writing axes only", stacklevel=2)

    xs = [p[0] for _, points in series for p in points]
    ys = [p[1] for _, points in series for p in points]
    ref_values = [r for r in spec.reference_lines if not spec.log_y or r > 0]
    ys.extend(ref_values)
    x_lo, x_hi = _axis_range(xs, spec.log_x) if xs else (0.0, 1.0)
    y_lo, y_hi = _axis_range(ys, spec.log_y) if ys else (0.0, 1.0)

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(value: float) -> float:
        return _LEFT + (_project(value, spec.log_x) - x_lo) / (x_hi - x_lo) * plot_w

    def sy(value: float) -> float:
        return _TOP + plot_h - (_project(value, spec.log_y) - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH:.0f}" '
        f'height="{_HEIGHT:.0f}" viewBox="0 0 {_WIDTH:.0f} {_HEIGHT:.0f}">',
        f'<rect width="{_WIDTH:.0f}" height="{_HEIGHT:.0f}" fill="white"/>',
        f'<rect x="{_coord(_LEFT)}" y="{_coord(_TOP)}" width="{_coord(plot_w)}" '
        f'height="{_coord(plot_h)}" fill="none" stroke="black"/>',
    ]

    for i in range(5):
        frac = i / 4.0
        tick_x = x_lo + frac * (x_hi - x_lo)
        tick_y = y_lo + frac * (y_hi - y_lo)
        x_value = 10.0**tick_x if spec.log_x else tick_x
        y_value = 10.0**tick_y if spec.log_y else tick_y
        px = _LEFT + frac * plot_w
        py = _TOP + plot_h - frac * plot_h
        parts.append(
            f'<line x1="{_coord(px)}" y1="{_coord(_TOP + plot_h)}" '
            f'x2="{_coord(px)}" y2="{_coord(_TOP + plot_h + 5)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_coord(px)}" y="{_coord(_TOP + plot_h + 18)}" '
            f'font-family="sans-serif" font-size="11" text-anchor="middle">'
            f"{_escape(f'{x_value:.4g}')}</text>"
        )
        parts.append(
            f'<line x1="{_coord(_LEFT - 5)}" y1="{_coord(py)}" '
            f'x2="{_coord(_LEFT)}" y2="{_coord(py)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_coord(_LEFT - 8)}" y="{_coord(py + 4)}" '
            f'font-family="sans-serif" font-size="11" text-anchor="end">'
            f"{_escape(f'{y_value:.4g}')}</text>"
        )

    for ref in sorted(ref_values):
        py = sy(ref)
        parts.append(
            f'<line x1="{_coord(_LEFT)}" y1="{_coord(py)}" '
            f'x2="{_coord(_LEFT + plot_w)}" y2="{_coord(py)}" '
            f'stroke="#555555" stroke-dasharray="6,4"/>'
        )

    for index, (label, points) in enumerate(series):
        color = _PALETTE[index % len(_PALETTE)]
        if len(points) > 1:
            coords = " ".join(f"{_coord(sx(x))},{_coord(sy(y))}" for x, y in points)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        for x, y in points:
            parts.append(
                f'<circle cx="{_coord(sx(x))}" cy="{_coord(sy(y))}" r="3" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{_coord(_LEFT + plot_w - 8)}" y="{_coord(_TOP + 16 + 14 * index)}" '
            f'font-family="sans-serif" font-size="11" text-anchor="end" '
            f'fill="{color}">{_escape(label)}</text>'
        )

    if spec.title:
        parts.append(
            f'<text x="{_coord(_WIDTH / 2)}" y="{_coord(_TOP - 14)}" '
            f'font-family="sans-serif" font-size="14" text-anchor="middle">'
            f"{_escape(spec.title)}</text>"
        )
    if spec.x_label:
        parts.append(
            f'<text x="{_coord(_LEFT + plot_w / 2)}" y="{_coord(_HEIGHT - 14)}" '
            f'font-family="sans-serif" font-size="12" text-anchor="middle">'
            f"{_escape(spec.x_label)}</text>"
        )
    if spec.y_label:
        cx, cy = 18.0, _TOP + plot_h / 2
        parts.append(
            f'<text x="{_coord(cx)}" y="{_coord(cy)}" font-family="sans-serif" '
            f'font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 {_coord(cx)} {_coord(cy)})">'
            f"{_escape(spec.y_label)}</text>"
        )

    parts.append("</svg>")
    with open(spec.out_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(parts) + "\n")
    return spec.out_path
