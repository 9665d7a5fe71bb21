"""Self-contained SVG rate-memory chart."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .harness import RateMemoryTable

__all__ = ["plot_svg", "render_svg"]

WIDTH, HEIGHT = 720, 480
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 30, 60
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
DASHED = {"lower-bound", "upper-bound"}


def _nice_max(v: float) -> float:
    if v <= 0:
        return 1.0
    mag = 10 ** math.floor(math.log10(v))
    for k in (1, 2, 2.5, 5, 10):
        if k * mag >= v:
            return k * mag
    return 10 * mag


def render_svg(table: RateMemoryTable, title: str = "Expected rate vs. cache size") -> str:
    series = table.series
    if not series:
        raise ValueError("no series to plot")
    x_max = float(table.m) if table.m else max(r.M for r in table.rows) or 1.0
    y_max = _nice_max(max(r.mean for r in table.rows) * 1.05)
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + x / x_max * pw

    def sy(y):
        return TOP + ph - y / y_max * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{LEFT + pw / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>']
    # axes and ticks
    out.append(f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>')
    out.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>')
    for k in range(6):
        xv = x_max * k / 5
        yv = y_max * k / 5
        out.append(f'<line x1="{sx(xv):.1f}" y1="{TOP + ph}" x2="{sx(xv):.1f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{sx(xv):.1f}" y="{TOP + ph + 18}" text-anchor="middle">{xv:g}</text>')
        out.append(f'<line x1="{LEFT - 5}" y1="{sy(yv):.1f}" x2="{LEFT}" y2="{sy(yv):.1f}" stroke="black"/>')
        out.append(f'<line x1="{LEFT}" y1="{sy(yv):.1f}" x2="{LEFT + pw}" y2="{sy(yv):.1f}" stroke="#eeeeee"/>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">'
               'cache size M (in files)</text>')
    out.append(f'<text transform="translate(18 {TOP + ph / 2:.1f}) rotate(-90)" text-anchor="middle">'
               'expected rate R (in files)</text>')

    for i, name in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        xs, ys = table.curve(name)
        dash = ' stroke-dasharray="6 4"' if name in DASHED else ""
        if len(xs) == 1:
            out.append(f'<circle cx="{sx(xs[0]):.2f}" cy="{sy(ys[0]):.2f}" r="4" fill="{color}"/>')
        else:
            pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
        ly = TOP + 10 + 20 * i
        lx = LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_svg(table: RateMemoryTable, path, title: str = "Expected rate vs. cache size") -> None:
    svg = render_svg(table, title)
    try:
        with open(path, "w") as fh:
            fh.write(svg)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
