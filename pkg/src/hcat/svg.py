"""Hand-rolled deterministic SVG charts for the report command.

No external renderer: charts are assembled as plain SVG strings with
fixed layout and formatting, so identical inputs give byte-identical
files.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

WIDTH = 860
HEIGHT = 420
MARGIN_L = 70
MARGIN_R = 30
MARGIN_T = 48
MARGIN_B = 58

PALETTE = ("#c0392b", "#2471a3", "#7d3c98", "#1e8449", "#b7950b", "#5d6d7e")


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if v == v else "nan"


def _esc(text: str) -> str:
    return (
        str(text).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(1, n)
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


class Chart:
    """Cartesian chart surface with linear or log axes."""

    def __init__(self, title: str, xlabel: str, ylabel: str,
                 xlog: bool = False, ylog: bool = False):
        self.title = title
        self.xlabel = xlabel
        self.ylabel = ylabel
        self.xlog = xlog
        self.ylog = ylog
        self.body: list = []
        self.legend: list = []
        self.x_range = (0.0, 1.0)
        self.y_range = (0.0, 1.0)

    def set_ranges(self, xs: Sequence[float], ys: Sequence[float]) -> None:
        xs = [x for x in xs if x == x]
        ys = [y for y in ys if y == y]
        if not xs:
            xs = [0.0, 1.0]
        if not ys:
            ys = [0.0, 1.0]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if self.xlog:
            x_lo = max(x_lo, 1e-12)
        if self.ylog:
            y_lo = max(y_lo, 1e-12)
        if not self.ylog:
            y_lo = min(0.0, y_lo)
        pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else 1.0
        self.x_range = (x_lo, x_hi if x_hi > x_lo else x_lo + 1)
        self.y_range = (y_lo, y_hi + (0 if self.ylog else pad))

    def _px(self, x: float) -> float:
        lo, hi = self.x_range
        if self.xlog:
            lo, hi, x = math.log10(lo), math.log10(hi), math.log10(max(x, 1e-12))
        span = hi - lo or 1.0
        return MARGIN_L + (x - lo) / span * (WIDTH - MARGIN_L - MARGIN_R)

    def _py(self, y: float) -> float:
        lo, hi = self.y_range
        if self.ylog:
            lo, hi, y = math.log10(lo), math.log10(hi), math.log10(max(y, 1e-12))
        span = hi - lo or 1.0
        return HEIGHT - MARGIN_B - (y - lo) / span * (HEIGHT - MARGIN_T - MARGIN_B)

    def polyline(self, xs, ys, color: str, label: str | None = None, width: float = 1.8) -> None:
        pts = [
            f"{self._px(float(x)):.2f},{self._py(float(y)):.2f}"
            for x, y in zip(xs, ys)
            if y == y
        ]
        if pts:
            self.body.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
                f'points="{" ".join(pts)}"/>'
            )
        if label:
            self.legend.append((label, color))

    def band(self, xs, lo_ys, hi_ys, color: str, opacity: float = 0.25,
             label: str | None = None) -> None:
        fwd = [(x, y) for x, y in zip(xs, lo_ys) if y == y]
        bwd = [(x, y) for x, y in zip(xs, hi_ys) if y == y]
        if not fwd or not bwd:
            return
        pts = [f"{self._px(float(x)):.2f},{self._py(float(y)):.2f}" for x, y in fwd]
        pts += [f"{self._px(float(x)):.2f},{self._py(float(y)):.2f}" for x, y in reversed(bwd)]
        self.body.append(
            f'<polygon fill="{color}" fill-opacity="{opacity}" stroke="none" '
            f'points="{" ".join(pts)}"/>'
        )
        if label:
            self.legend.append((label, color))

    def dots(self, xs, ys, color: str, label: str | None = None, r: float = 3.0) -> None:
        for x, y in zip(xs, ys):
            if y != y:
                continue
            self.body.append(
                f'<circle cx="{self._px(float(x)):.2f}" cy="{self._py(float(y)):.2f}" '
                f'r="{r}" fill="{color}"/>'
            )
        if label:
            self.legend.append((label, color))

    def bars(self, labels, values, colors=None) -> None:
        k = len(values)
        if k == 0:
            return
        plot_w = WIDTH - MARGIN_L - MARGIN_R
        slot = plot_w / k
        bar_w = slot * 0.7
        y0 = self._py(max(0.0, self.y_range[0]))
        for i, v in enumerate(values):
            if v != v:
                continue
            color = (colors or PALETTE)[i % len(colors or PALETTE)]
            x = MARGIN_L + i * slot + (slot - bar_w) / 2
            y = self._py(float(v))
            top, bot = min(y, y0), max(y, y0)
            self.body.append(
                f'<rect x="{x:.2f}" y="{top:.2f}" width="{bar_w:.2f}" '
                f'height="{bot - top:.2f}" fill="{color}"/>'
            )
            self.body.append(
                f'<text x="{x + bar_w / 2:.2f}" y="{HEIGHT - MARGIN_B + 16}" '
                f'font-size="11" text-anchor="middle">{_esc(labels[i])}</text>'
            )

    def hline(self, y: float, color: str = "#888888", dash: str = "4,3") -> None:
        py = self._py(y)
        self.body.append(
            f'<line x1="{MARGIN_L}" y1="{py:.2f}" x2="{WIDTH - MARGIN_R}" '
            f'y2="{py:.2f}" stroke="{color}" stroke-dasharray="{dash}"/>'
        )

    def _axes(self, x_tick_labels=None) -> list:
        parts = []
        x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
        parts.append(
            f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="#333"/>'
        )
        parts.append(
            f'<line x1="{x0}" y1="{y0}" x2="{WIDTH - MARGIN_R}" y2="{y0}" stroke="#333"/>'
        )
        # y ticks
        lo, hi = self.y_range
        tick_vals = (
            [10**e for e in range(int(math.floor(math.log10(max(lo, 1e-12)))),
                                  int(math.ceil(math.log10(max(hi, 1e-12)))) + 1)]
            if self.ylog
            else _nice_ticks(lo, hi)
        )
        for t in tick_vals:
            if not (lo <= t <= hi * (1 + 1e-9)):
                continue
            py = self._py(t)
            parts.append(f'<line x1="{x0 - 4}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="#333"/>')
            parts.append(
                f'<text x="{x0 - 8}" y="{py + 4:.2f}" font-size="11" '
                f'text-anchor="end">{_fmt(t)}</text>'
            )
        # x ticks
        if x_tick_labels:
            for frac, text in x_tick_labels:
                px = MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R)
                parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 4}" stroke="#333"/>')
                parts.append(
                    f'<text x="{px:.2f}" y="{y0 + 18}" font-size="11" '
                    f'text-anchor="middle">{_esc(text)}</text>'
                )
        else:
            lo_x, hi_x = self.x_range
            tick_vals = (
                [10**e for e in range(int(math.floor(math.log10(max(lo_x, 1e-12)))),
                                      int(math.ceil(math.log10(max(hi_x, 1e-12)))) + 1)]
                if self.xlog
                else _nice_ticks(lo_x, hi_x)
            )
            for t in tick_vals:
                if not (lo_x <= t <= hi_x * (1 + 1e-9)):
                    continue
                px = self._px(t)
                parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 4}" stroke="#333"/>')
                parts.append(
                    f'<text x="{px:.2f}" y="{y0 + 18}" font-size="11" '
                    f'text-anchor="middle">{_fmt(t)}</text>'
                )
        return parts

    def render(self, x_tick_labels=None) -> str:
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="DejaVu Sans, sans-serif">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.0f}" y="24" font-size="15" text-anchor="middle" '
            f'font-weight="bold">{_esc(self.title)}</text>',
            f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 12}" font-size="12" '
            f'text-anchor="middle">{_esc(self.xlabel)}</text>',
            f'<text x="16" y="{HEIGHT / 2:.0f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 16 {HEIGHT / 2:.0f})">{_esc(self.ylabel)}</text>',
        ]
        parts.extend(self._axes(x_tick_labels))
        parts.extend(self.body)
        for i, (label, color) in enumerate(self.legend):
            lx = MARGIN_L + 10
            ly = MARGIN_T + 8 + 16 * i
            parts.append(f'<rect x="{lx}" y="{ly - 9}" width="12" height="9" fill="{color}"/>')
            parts.append(f'<text x="{lx + 17}" y="{ly}" font-size="11">{_esc(label)}</text>')
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def daily_series_chart(days, counts, labels, title="Daily tweet volume") -> str:
    """Line chart of per-label daily counts; days label the x axis."""
    chart = Chart(title, "day", "tweets per day")
    xs = list(range(len(days)))
    chart.set_ranges(xs, [float(counts[:, j].max()) for j in range(counts.shape[1])] or [1.0])
    for j, lbl in enumerate(labels):
        chart.polyline(xs, counts[:, j].astype(float), PALETTE[j % len(PALETTE)], label=lbl)
    n_marks = min(6, len(days))
    marks = []
    for k in range(n_marks):
        i = round(k * (len(days) - 1) / max(1, n_marks - 1))
        marks.append((i / max(1, len(days) - 1), days[i]))
    return chart.render(x_tick_labels=marks)


def tail_chart(hist: dict, title="Per-user activity distribution") -> str:
    """Log-log scatter of tweets-per-user frequency."""
    xs = sorted(hist)
    ys = [hist[x] for x in xs]
    chart = Chart(title, "tweets by one user", "number of users", xlog=True, ylog=True)
    chart.set_ranges([max(1, x) for x in xs] or [1], [max(1, y) for y in ys] or [1])
    chart.dots([max(1, x) for x in xs], ys, PALETTE[1])
    return chart.render()


def ratio_bar_chart(names, ratios, title="Connectivity vs shuffled baseline") -> str:
    chart = Chart(title, "category pair", "observed / baseline")
    finite = [r for r in ratios if r == r]
    chart.set_ranges([0, 1], finite or [1.0])
    chart.hline(1.0)
    chart.bars(names, ratios)
    return chart.render(x_tick_labels=[])


def risk_chart(curve, title=None) -> str:
    """Empirical risk with the null band (mean ± 2 std)."""
    title = title or f"Infection risk {curve.pair_name}"
    chart = Chart(title, "exposures n", "risk")
    xs = curve.levels.astype(float)
    ys = [float(v) for v in curve.risk]
    pool = [v for v in ys if v == v]
    if curve.baseline_mean is not None:
        lo = curve.baseline_mean - 2 * curve.baseline_std
        hi = curve.baseline_mean + 2 * curve.baseline_std
        pool += [float(v) for v in hi if v == v] + [float(v) for v in lo if v == v]
        chart.set_ranges(xs, pool or [1.0])
        chart.band(xs, lo, hi, "#9bbcd8", label="null mean ± 2 std")
        chart.polyline(xs, curve.baseline_mean, PALETTE[1], label="null mean", width=1.2)
    else:
        chart.set_ranges(xs, pool or [1.0])
    chart.polyline(xs, ys, PALETTE[0], label="empirical")
    chart.dots(xs, ys, PALETTE[0], r=2.4)
    return chart.render()
