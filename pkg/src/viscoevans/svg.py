"""Deterministic SVG figures: phase portraits, profiles and Evans image curves.

Output depends only on the input data: fixed viewport, fixed drawing order
and fixed number formatting.
"""

from __future__ import annotations

import math
from html import escape

import numpy as np

__all__ = ["Figure", "portrait_svg", "profile_svg", "image_curve_svg"]

_W, _H = 640, 480
_M = 56  # margin
_PALETTE = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#2e4053")
_MORSE_COLOURS = {"Saddle": "#b03a2e", "Attractor": "#1e8449", "Repellor": "#1f4e79",
                  "Degenerate": "#7f7f7f"}


def _f(x: float) -> str:
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _nice(lo: float, hi: float) -> tuple[float, float]:
    if not (math.isfinite(lo) and math.isfinite(hi)):
        return -1.0, 1.0
    if hi - lo < 1e-12:
        pad = max(abs(lo), 1.0) * 0.5
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


class Figure:
    def __init__(self, xlim, ylim, title: str = "", xlabel: str = "", ylabel: str = ""):
        self.x0, self.x1 = map(float, xlim)
        self.y0, self.y1 = map(float, ylim)
        self.parts: list[str] = []
        self.title, self.xlabel, self.ylabel = title, xlabel, ylabel

    def px(self, x: float) -> float:
        return _M + (x - self.x0) / (self.x1 - self.x0) * (_W - 2 * _M)

    def py(self, y: float) -> float:
        return _H - _M - (y - self.y0) / (self.y1 - self.y0) * (_H - 2 * _M)

    def polyline(self, xs, ys, colour: str, width: float = 1.2, dash: str | None = None) -> None:
        pts = [(self.px(x), self.py(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)]
        if len(pts) < 2:
            return
        d = " ".join(f"{_f(a)},{_f(b)}" for a, b in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="{width}"{extra} '
                          f'points="{d}"/>')

    def dot(self, x: float, y: float, colour: str, r: float = 4.0, label: str = "") -> None:
        self.parts.append(f'<circle cx="{_f(self.px(x))}" cy="{_f(self.py(y))}" r="{r}" fill="{colour}"/>')
        if label:
            self.text(self.px(x) + 6, self.py(y) - 6, label, size=11)

    def text(self, x: float, y: float, s: str, size: int = 13, anchor: str = "start") -> None:
        self.parts.append(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" '
                          f'font-family="sans-serif">{escape(s)}</text>')

    def rect(self, x0, y0, x1, y1, colour: str, opacity: float) -> None:
        a, b = self.px(x0), self.py(y1)
        w, h = self.px(x1) - a, self.py(y0) - b
        self.parts.append(f'<rect x="{_f(a)}" y="{_f(b)}" width="{_f(w)}" height="{_f(h)}" '
                          f'fill="{colour}" fill-opacity="{opacity}" stroke="none"/>')

    def _frame(self) -> list[str]:
        out = [f'<rect x="{_M}" y="{_M}" width="{_W - 2 * _M}" height="{_H - 2 * _M}" '
               'fill="none" stroke="#000" stroke-width="1"/>']
        if self.x0 < 0 < self.x1:
            out.append(f'<line x1="{_f(self.px(0))}" y1="{_M}" x2="{_f(self.px(0))}" y2="{_H - _M}" '
                       'stroke="#999" stroke-width="0.6"/>')
        if self.y0 < 0 < self.y1:
            out.append(f'<line x1="{_M}" y1="{_f(self.py(0))}" x2="{_W - _M}" y2="{_f(self.py(0))}" '
                       'stroke="#999" stroke-width="0.6"/>')
        for v, lab in ((self.x0, "start"), (self.x1, "end")):
            out.append(f'<text x="{_f(self.px(v))}" y="{_H - _M + 16}" font-size="11" text-anchor="{lab}" '
                       f'font-family="sans-serif">{v:.3g}</text>')
        for v, dy in ((self.y0, 0), (self.y1, 10)):
            out.append(f'<text x="{_M - 4}" y="{_f(self.py(v) + dy)}" font-size="11" text-anchor="end" '
                       f'font-family="sans-serif">{v:.3g}</text>')
        return out

    def render(self) -> str:
        head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
                f'viewBox="0 0 {_W} {_H}">', f'<rect width="{_W}" height="{_H}" fill="#fff"/>']
        clip = (f'<clipPath id="plot"><rect x="{_M}" y="{_M}" width="{_W - 2 * _M}" '
                f'height="{_H - 2 * _M}"/></clipPath>')
        body = [clip, '<g clip-path="url(#plot)">', *self.parts, "</g>"]
        labels = []
        if self.title:
            labels.append(f'<text x="{_W / 2:.2f}" y="{_M - 20}" font-size="15" text-anchor="middle" '
                          f'font-family="sans-serif">{escape(self.title)}</text>')
        if self.xlabel:
            labels.append(f'<text x="{_W / 2:.2f}" y="{_H - 14}" font-size="13" text-anchor="middle" '
                          f'font-family="sans-serif">{escape(self.xlabel)}</text>')
        if self.ylabel:
            labels.append(f'<text x="16" y="{_H / 2:.2f}" font-size="13" text-anchor="middle" '
                          f'font-family="sans-serif" transform="rotate(-90 16 {_H / 2:.2f})">'
                          f'{escape(self.ylabel)}</text>')
        return "\n".join(head + self._frame() + body + labels + ["</svg>"]) + "\n"


def portrait_svg(portrait, title: str = "") -> str:
    """Orbits, equilibria (coloured by Morse type) and the elliptic region if present."""
    x0, x1, y0, y1 = portrait.window
    fig = Figure((x0, x1), (y0, y1), title, *portrait.axis_labels)
    if portrait.elliptic_mask is not None:
        gx, gy, mask = portrait.elliptic_mask
        dx = (gx[1] - gx[0]) / 2 if len(gx) > 1 else 0.0
        dy = (gy[1] - gy[0]) / 2 if len(gy) > 1 else 0.0
        for j, y in enumerate(gy):
            for i, x in enumerate(gx):
                if mask[j, i]:
                    fig.rect(x - dx, y - dy, x + dx, y + dy, "#f5b041", 0.35)
    if portrait.feasibility_line is not None:
        fig.polyline([x0, x1], [portrait.feasibility_line] * 2, "#555", 1.0, "6,4")
    for tr in portrait.trajectories:
        tr = np.asarray(tr)
        fig.polyline(tr[:, 0], tr[:, 1], "#4d6d8c", 0.8)
    for eq in portrait.equilibria:
        name = getattr(eq.morse, "value", str(eq.morse))
        fig.dot(float(eq.a[0]), float(eq.a[1]), _MORSE_COLOURS.get(name, "#000"), 4.5, name)
    return fig.render()


def profile_svg(grid, title: str = "") -> str:
    """Profile components against ``z``."""
    z = np.asarray(grid.z)
    vals = np.asarray(grid.a_vals)
    lo, hi = _nice(float(vals.min()), float(vals.max()))
    fig = Figure((float(z[0]), float(z[-1])), (lo, hi), title, "z", "a")
    for k in range(vals.shape[1]):
        fig.polyline(z, vals[:, k], _PALETTE[k % len(_PALETTE)], 1.6)
    return fig.render()


def image_curve_svg(samples, title: str = "") -> str:
    """Image of the contour under the Evans function (``samples`` are complex values)."""
    v = np.asarray(list(samples), dtype=complex)
    v = v[np.isfinite(v)]
    if v.size == 0:
        return Figure((-1, 1), (-1, 1), title, "Re D", "Im D").render()
    xlo, xhi = _nice(min(float(v.real.min()), 0.0), max(float(v.real.max()), 0.0))
    ylo, yhi = _nice(min(float(v.imag.min()), 0.0), max(float(v.imag.max()), 0.0))
    fig = Figure((xlo, xhi), (ylo, yhi), title, "Re D", "Im D")
    fig.polyline(v.real, v.imag, _PALETTE[0], 1.4)
    fig.dot(float(v[0].real), float(v[0].imag), _PALETTE[1], 3.0)
    return fig.render()
