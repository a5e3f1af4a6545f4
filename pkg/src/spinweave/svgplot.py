"""Tiny dependency-free SVG writer for the simulate command's quick-look plot.

Two stacked panels: the time trace on top, its spectrum below.  This is
deliberately minimal (fixed size, linear axes, one curve per panel) --
the CSV artifacts are the real output; the SVG is for eyeballing a run
without firing up a plotting stack.
"""

import numpy as np

_WIDTH = 720
_PANEL_H = 260
_MARGIN_L = 64
_MARGIN_R = 16
_MARGIN_T = 34
_MARGIN_B = 44


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _panel(x, y, top: int, xlabel: str, ylabel: str, color: str) -> list[str]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    left, right = _MARGIN_L, _WIDTH - _MARGIN_R
    box_top, box_bot = top + _MARGIN_T, top + _PANEL_H - _MARGIN_B

    def sx(v):
        return left + (v - x0) / (x1 - x0) * (right - left)

    def sy(v):
        return box_bot - (v - y0) / (y1 - y0) * (box_bot - box_top)

    out = [
        f'<rect x="{left}" y="{box_top}" width="{right - left}" '
        f'height="{box_bot - box_top}" fill="none" stroke="#444"/>'
    ]
    for xt in np.linspace(x0, x1, 5):
        px = sx(xt)
        out.append(
            f'<line x1="{px:.1f}" y1="{box_bot}" x2="{px:.1f}" y2="{box_bot + 5}" stroke="#444"/>'
        )
        out.append(
            f'<text x="{px:.1f}" y="{box_bot + 18}" font-size="11" '
            f'text-anchor="middle">{_fmt(xt)}</text>'
        )
    for yt in np.linspace(y0, y1, 5):
        py = sy(yt)
        out.append(
            f'<line x1="{left - 5}" y1="{py:.1f}" x2="{left}" y2="{py:.1f}" stroke="#444"/>'
        )
        out.append(
            f'<text x="{left - 8}" y="{py + 4:.1f}" font-size="11" '
            f'text-anchor="end">{_fmt(yt)}</text>'
        )
    pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
    out.append(
        f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'
    )
    out.append(
        f'<text x="{(left + right) / 2:.0f}" y="{box_bot + 34}" font-size="12" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="16" y="{(box_top + box_bot) / 2:.0f}" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {(box_top + box_bot) / 2:.0f})">'
        f"{ylabel}</text>"
    )
    return out


def two_panel_svg(t, signal, freq_cm1, power, title: str = "") -> str:
    height = 2 * _PANEL_H + 10
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{height}" '
        f'viewBox="0 0 {_WIDTH} {height}" font-family="sans-serif">',
        f'<rect width="{_WIDTH}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_WIDTH / 2:.0f}" y="20" font-size="13" '
            f'text-anchor="middle">{title}</text>'
        )
    parts += _panel(t, signal, 0, "delay (ps)", "signal", "#1f77b4")
    parts += _panel(freq_cm1, power, _PANEL_H + 10, "frequency (cm^-1)", "power", "#d62728")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
