"""Minimal SVG line charts."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 300
MARGIN = (60, 20, 30, 45)  # left, right, top, bottom


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [round(start + i * step, 12) for i in range(int((hi - start) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_chart(t, y, title: str, ylabel: str, xlabel: str = "t [s]") -> str:
    """Render one series as a standalone SVG document (deterministic output)."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    left, right, top, bottom = MARGIN
    pw, ph = WIDTH - left - right, HEIGHT - top - bottom
    x0, x1 = (float(t.min()), float(t.max())) if t.size else (0.0, 1.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    finite = y[np.isfinite(y)]
    y0, y1 = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    for v in _ticks(x0, x1):
        X = sx(v)
        out.append(f'<line x1="{X:.2f}" y1="{top}" x2="{X:.2f}" y2="{top + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{X:.2f}" y="{top + ph + 15}" text-anchor="middle">{_fmt(v)}</text>')
    for v in _ticks(y0, y1):
        Y = sy(v)
        out.append(f'<line x1="{left}" y1="{Y:.2f}" x2="{left + pw}" y2="{Y:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{left - 6}" y="{Y + 4:.2f}" text-anchor="end">{_fmt(v)}</text>')
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(t, y) if math.isfinite(b))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>')
    out.append(f'<text x="{left + pw / 2}" y="{HEIGHT - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text transform="translate(14 {top + ph / 2}) rotate(-90)" text-anchor="middle">{escape(ylabel)}</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def landing_panels(log) -> dict[str, str]:
    """SVGs of altitude, tilt, blending factor and mean normalized thrust, keyed by file stem."""
    return {
        "z": line_chart(log.t, log.x[:, 2], "Altitude", "z [m]"),
        "phi": line_chart(log.t, np.degrees(log.phi), "Tilt angle", "phi [deg]"),
        "alpha": line_chart(log.t, log.alpha, "Cost blending factor", "alpha"),
        "ubar": line_chart(log.t, log.u_a.mean(axis=1), "Mean normalized thrust", "u_bar"),
    }
