"""Minimal SVG line plot for sweep curves (polyline, axes, status markers)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

STATUS_COLORS = {"converged": "#1b7837", "mass_escape": "#c51b7d", "max_iters": "#e08214", "failed": "#555555"}


def _ticks(lo, hi, k=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (k - 1) for i in range(k)]


def line_plot(xs, ys, statuses=None, *, title="", xlabel="M", ylabel="energy", width=640, height=420) -> str:
    pts = [(x, y, s) for x, y, s in zip(xs, ys, statuses or ["converged"] * len(xs)) if math.isfinite(y)]
    ml, mr, mt, mb = 70, 20, 40, 50
    W, H = width - ml - mr, height - mt - mb
    if pts:
        x0, x1 = min(p[0] for p in pts), max(p[0] for p in pts)
        y0, y1 = min(p[1] for p in pts), max(p[1] for p in pts)
    else:
        x0 = x1 = y0 = y1 = 0.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return ml + W * (x - x0) / (x1 - x0)

    def py(y):
        return mt + H * (1.0 - (y - y0) / (y1 - y0))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{ml}" y1="{mt + H}" x2="{ml + W}" y2="{mt + H}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + H}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{px(t):.1f}" y="{mt + H + 18}" text-anchor="middle" font-size="11">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{ml - 6}" y="{py(t) + 4:.1f}" text-anchor="end" font-size="11">{t:.3g}</text>')
    out.append(f'<text x="{ml + W / 2:.1f}" y="{height - 10}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{mt + H / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 16 {mt + H / 2:.1f})">{escape(ylabel)}</text>'
    )
    if pts:
        poly = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y, _ in pts)
        out.append(f'<polyline points="{poly}" fill="none" stroke="#2166ac" stroke-width="1.5"/>')
        for x, y, s in pts:
            c = STATUS_COLORS.get(s, "#000000")
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="4" fill="{c}"><title>{escape(s)}</title></circle>')
    for i, (s, c) in enumerate(STATUS_COLORS.items()):
        y = mt + 8 + 16 * i
        out.append(f'<circle cx="{ml + W - 110}" cy="{y}" r="4" fill="{c}"/>')
        out.append(f'<text x="{ml + W - 100}" y="{y + 4}" font-size="11">{s}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
