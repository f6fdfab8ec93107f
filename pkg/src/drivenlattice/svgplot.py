"""Minimal SVG line plot with error bars, built from primitives.

Quick-look rendering only; nothing downstream depends on it.
"""

from __future__ import annotations

import math

_WIDTH, _HEIGHT = 640, 440
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 20, 30, 50


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * abs(step):
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def line_plot(x, y, yerr=None, *, title="", xlabel="", ylabel="") -> str:
    """Render one x/y series (optionally with error bars) to an SVG string."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    es = [float(v) for v in (yerr if yerr is not None else [0.0] * len(xs))]
    if len(xs) != len(ys) or len(xs) != len(es):
        raise ValueError("x, y and yerr must have equal lengths")
    if not xs:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs), max(xs)
    y_lo = min(v - e for v, e in zip(ys, es))
    y_hi = max(v + e for v, e in zip(ys, es))
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(v):
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) \
            * (_WIDTH - _MARGIN_L - _MARGIN_R)

    def sy(v):
        return _HEIGHT - _MARGIN_B - (v - y_lo) / (y_hi - y_lo) \
            * (_HEIGHT - _MARGIN_T - _MARGIN_B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]
    axis = f'{_MARGIN_L},{_MARGIN_T} {_MARGIN_L},{_HEIGHT - _MARGIN_B} ' \
           f'{_WIDTH - _MARGIN_R},{_HEIGHT - _MARGIN_B}'
    parts.append(f'<polyline points="{axis}" fill="none" stroke="black"/>')
    for tv in _ticks(x_lo, x_hi):
        px = sx(tv)
        parts.append(f'<line x1="{px:.1f}" y1="{_HEIGHT - _MARGIN_B}" '
                     f'x2="{px:.1f}" y2="{_HEIGHT - _MARGIN_B + 5}" '
                     'stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{_HEIGHT - _MARGIN_B + 18}" '
                     'font-size="11" text-anchor="middle">'
                     f'{tv:.6g}</text>')
    for tv in _ticks(y_lo, y_hi):
        py = sy(tv)
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{py:.1f}" '
                     f'x2="{_MARGIN_L}" y2="{py:.1f}" stroke="black"/>')
        parts.append(f'<text x="{_MARGIN_L - 8}" y="{py + 4:.1f}" '
                     'font-size="11" text-anchor="end">'
                     f'{tv:.6g}</text>')
    if any(es):
        for xv, yv, ev in zip(xs, ys, es):
            if ev > 0:
                px, y1, y2 = sx(xv), sy(yv - ev), sy(yv + ev)
                parts.append(f'<line x1="{px:.1f}" y1="{y1:.1f}" '
                             f'x2="{px:.1f}" y2="{y2:.1f}" '
                             'stroke="steelblue"/>')
                for yy in (y1, y2):
                    parts.append(f'<line x1="{px - 3:.1f}" y1="{yy:.1f}" '
                                 f'x2="{px + 3:.1f}" y2="{yy:.1f}" '
                                 'stroke="steelblue"/>')
    pts = " ".join(f"{sx(xv):.1f},{sy(yv):.1f}" for xv, yv in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="crimson" '
                 'stroke-width="1.5"/>')
    for xv, yv in zip(xs, ys):
        parts.append(f'<circle cx="{sx(xv):.1f}" cy="{sy(yv):.1f}" r="2.5" '
                     'fill="crimson"/>')
    if title:
        parts.append(f'<text x="{_WIDTH / 2}" y="{_MARGIN_T - 10}" '
                     f'font-size="13" text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{_WIDTH / 2}" y="{_HEIGHT - 12}" '
                     f'font-size="12" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{_HEIGHT / 2}" font-size="12" '
                     f'text-anchor="middle" '
                     f'transform="rotate(-90 16 {_HEIGHT / 2})">{ylabel}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
