"""Hand-rolled SVG line plots.

Just enough to draw histograms, analytic curves, and ellipse loci in a
self-contained file: a white canvas, linear axes with tick labels, and
polyline/rect primitives.  No external renderer is involved.
"""

from __future__ import annotations

import math

import numpy as np

_PALETTE = ("#1f6fb2", "#d95f02", "#2ca02c", "#7570b3", "#a6761d", "#e7298a")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next((mag * mult for mult in (1.0, 2.0, 5.0, 10.0) if mag * mult >= raw), mag * 10.0)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:g}"


class SvgCanvas:
    """Accumulates SVG elements over a fixed data-to-pixel mapping."""

    def __init__(
        self,
        xlim: tuple[float, float],
        ylim: tuple[float, float],
        width: int = 720,
        height: int = 480,
        title: str = "",
        xlabel: str = "",
        ylabel: str = "",
    ):
        if not xlim[1] > xlim[0]:
            raise ValueError(f"degenerate x limits {xlim}")
        if not ylim[1] > ylim[0]:
            raise ValueError(f"degenerate y limits {ylim}")
        self.width = width
        self.height = height
        self.xlim = xlim
        self.ylim = ylim
        self.margin_left = 62
        self.margin_right = 18
        self.margin_top = 34 if title else 18
        self.margin_bottom = 46
        self._elements: list[str] = []
        self._title = title
        self._xlabel = xlabel
        self._ylabel = ylabel

    def _px(self, x: float) -> float:
        frac = (x - self.xlim[0]) / (self.xlim[1] - self.xlim[0])
        return self.margin_left + frac * (self.width - self.margin_left - self.margin_right)

    def _py(self, y: float) -> float:
        frac = (y - self.ylim[0]) / (self.ylim[1] - self.ylim[0])
        return self.height - self.margin_bottom - frac * (self.height - self.margin_top - self.margin_bottom)

    def polyline(self, xs, ys, color: str = _PALETTE[0], width: float = 1.5, close: bool = False) -> None:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        pts = [f"{self._px(x):.2f},{self._py(y):.2f}" for x, y in zip(xs, ys)]
        if close and pts:
            pts.append(pts[0])
        self._elements.append(
            f'<polyline points="{" ".join(pts)}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"/>'
        )

    def bars(self, edges, heights, color: str = "#9ecae1", stroke: str = "#4a7aa7") -> None:
        edges = np.asarray(edges, dtype=float)
        heights = np.asarray(heights, dtype=float)
        y0 = self._py(max(self.ylim[0], 0.0))
        for left, right, h in zip(edges[:-1], edges[1:], heights):
            x = self._px(left)
            w = self._px(right) - x
            y = self._py(h)
            self._elements.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{max(y0 - y, 0.0):.2f}" '
                f'fill="{color}" stroke="{stroke}" stroke-width="0.5"/>'
            )

    def legend(self, entries: list[tuple[str, str]]) -> None:
        x = self.margin_left + 12
        y = self.margin_top + 16
        for label, color in entries:
            self._elements.append(
                f'<line x1="{x}" y1="{y - 4}" x2="{x + 24}" y2="{y - 4}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            self._elements.append(
                f'<text x="{x + 30}" y="{y}" font-size="12" font-family="sans-serif">{label}</text>'
            )
            y += 18

    def _axes(self) -> list[str]:
        out = []
        x0, x1 = self.margin_left, self.width - self.margin_right
        y0, y1 = self.height - self.margin_bottom, self.margin_top
        out.append(
            f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
            f'fill="none" stroke="#333333" stroke-width="1"/>'
        )
        for t in _nice_ticks(*self.xlim):
            px = self._px(t)
            out.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="#333333"/>')
            out.append(
                f'<text x="{px:.2f}" y="{y0 + 18}" font-size="11" font-family="sans-serif" '
                f'text-anchor="middle">{_fmt(t)}</text>'
            )
        for t in _nice_ticks(*self.ylim):
            py = self._py(t)
            out.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="#333333"/>')
            out.append(
                f'<text x="{x0 - 8}" y="{py + 4:.2f}" font-size="11" font-family="sans-serif" '
                f'text-anchor="end">{_fmt(t)}</text>'
            )
        if self._title:
            out.append(
                f'<text x="{(x0 + x1) / 2:.2f}" y="{self.margin_top - 12}" font-size="14" '
                f'font-family="sans-serif" text-anchor="middle">{self._title}</text>'
            )
        if self._xlabel:
            out.append(
                f'<text x="{(x0 + x1) / 2:.2f}" y="{self.height - 10}" font-size="12" '
                f'font-family="sans-serif" text-anchor="middle">{self._xlabel}</text>'
            )
        if self._ylabel:
            cx, cy = 16, (y0 + y1) / 2
            out.append(
                f'<text x="{cx}" y="{cy:.2f}" font-size="12" font-family="sans-serif" '
                f'text-anchor="middle" transform="rotate(-90 {cx} {cy:.2f})">{self._ylabel}</text>'
            )
        return out

    def to_string(self) -> str:
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="white"/>',
        ]
        parts.extend(self._axes())
        parts.extend(self._elements)
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_string())


def palette(i: int) -> str:
    return _PALETTE[i % len(_PALETTE)]
