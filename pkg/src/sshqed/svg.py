"""Minimal SVG line charts for figure jobs; no plotting dependency."""

from __future__ import annotations

import math

__all__ = ["line_chart"]

_PALETTE = [
    "#c0392b", "#2980b9", "#27ae60", "#8e44ad",
    "#d35400", "#16a085", "#7f8c8d", "#2c3e50",
]

_WIDTH, _HEIGHT = 720, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 40, 56


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def line_chart(series, title: str, xlabel: str, ylabel: str, path: str) -> None:
    """Write a multi-line chart; ``series`` is a list of (label, xs, ys)."""
    if not series:
        raise ValueError("need at least one series")
    if len(series) > len(_PALETTE):
        raise ValueError(f"at most {len(_PALETTE)} series per chart")
    xlo = min(min(xs) for _, xs, _ in series)
    xhi = max(max(xs) for _, xs, _ in series)
    ylo = min(0.0, min(min(ys) for _, _, ys in series))
    yhi = max(max(ys) for _, _, ys in series)
    if yhi <= ylo:
        yhi = ylo + 1.0
    yhi += 0.05 * (yhi - ylo)
    if xhi <= xlo:
        xhi = xlo + 1.0

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + (x - xlo) / (xhi - xlo) * plot_w

    def py(y):
        return _MARGIN_T + plot_h - (y - ylo) / (yhi - ylo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_WIDTH} {_HEIGHT}" '
        f'font-family="sans-serif" font-size="13">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH / 2:.1f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
    ]
    axis = (
        f'<path d="M {px(xlo):.1f} {py(ylo):.1f} H {px(xhi):.1f} '
        f'M {px(xlo):.1f} {py(ylo):.1f} V {py(yhi):.1f}" stroke="black" fill="none"/>'
    )
    parts.append(axis)
    for t in _nice_ticks(xlo, xhi):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{py(ylo):.1f}" x2="{x:.1f}" y2="{py(ylo) + 5:.1f}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{py(ylo) + 20:.1f}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(ylo, yhi):
        y = py(t)
        parts.append(f'<line x1="{px(xlo) - 5:.1f}" y1="{y:.1f}" x2="{px(xlo):.1f}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{px(xlo) - 8:.1f}" y="{y + 4:.1f}" text-anchor="end">{t:g}</text>')
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{_HEIGHT - 14}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="20" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 20 {_MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>'
    )
    for idx, (label, xs, ys) in enumerate(series):
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{_PALETTE[idx]}" stroke-width="1.5"/>'
        )
        ly = _MARGIN_T + 14 + 16 * idx
        lx = _WIDTH - _MARGIN_R - 150
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{_PALETTE[idx]}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
