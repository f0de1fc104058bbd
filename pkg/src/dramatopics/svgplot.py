"""Tiny static SVG charts: line plots and labelled scatter plots."""

from __future__ import annotations

import math
from html import escape

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]

W, H = 720, 420
MARGIN = dict(left=64, right=160, top=40, bottom=48)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 10))
        v += step
    return out


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi == xlo:
            xlo, xhi = xlo - 1, xhi + 1
        if yhi == ylo:
            ylo, yhi = ylo - 1, yhi + 1
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.pw = W - MARGIN["left"] - MARGIN["right"]
        self.ph = H - MARGIN["top"] - MARGIN["bottom"]

    def x(self, v):
        return MARGIN["left"] + (v - self.xlo) / (self.xhi - self.xlo) * self.pw

    def y(self, v):
        return MARGIN["top"] + (1 - (v - self.ylo) / (self.yhi - self.ylo)) * self.ph

    def axes(self, title, xlabel, ylabel) -> list[str]:
        L, T = MARGIN["left"], MARGIN["top"]
        parts = [
            f'<rect x="{L}" y="{T}" width="{self.pw}" height="{self.ph}" fill="none" stroke="#333"/>',
            f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
            f'<text x="{L + self.pw / 2:.1f}" y="{H - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
            f'<text x="14" y="{T + self.ph / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 14 {T + self.ph / 2:.1f})">{escape(ylabel)}</text>',
        ]
        for t in _ticks(self.xlo, self.xhi):
            px = self.x(t)
            parts.append(f'<line x1="{px:.1f}" y1="{T + self.ph}" x2="{px:.1f}" y2="{T + self.ph + 5}" stroke="#333"/>')
            parts.append(f'<text x="{px:.1f}" y="{T + self.ph + 18}" text-anchor="middle" font-size="10">{t:g}</text>')
        for t in _ticks(self.ylo, self.yhi):
            py = self.y(t)
            parts.append(f'<line x1="{L - 5}" y1="{py:.1f}" x2="{L}" y2="{py:.1f}" stroke="#333"/>')
            parts.append(f'<text x="{L - 8}" y="{py + 3:.1f}" text-anchor="end" font-size="10">{t:g}</text>')
        return parts


def _doc(parts: list[str]) -> str:
    body = "\n".join(parts)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
            f'font-family="sans-serif">\n<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n')


def line_chart(series: dict[str, list[tuple[float, float]]], path, title="", xlabel="", ylabel="") -> None:
    """One polyline per named series, with a legend on the right."""
    pts = [p for s in series.values() for p in s]
    if not pts:
        raise ValueError("nothing to plot")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    fr = _Frame(min(xs), max(xs), min(0.0, min(ys)), max(ys))
    parts = fr.axes(title, xlabel, ylabel)
    for i, (name, s) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{fr.x(x):.2f},{fr.y(y):.2f}" for x, y in s)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN["top"] + 14 * i + 8
        lx = W - MARGIN["right"] + 10
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 18}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 22}" y="{ly + 4}" font-size="10">{escape(name)}</text>')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_doc(parts))


def scatter_chart(points, path, colors=None, labels=(), title="", xlabel="", ylabel="") -> None:
    """Points as small circles; `labels` are (text, x, y) drawn in bold on top.

    `colors` is an optional per-point value in [0, 1] mapped blue (0) to red (1).
    """
    pts = list(points)
    if not pts:
        raise ValueError("nothing to plot")
    xs = [p[0] for p in pts] + [l[1] for l in labels]
    ys = [p[1] for p in pts] + [l[2] for l in labels]
    fr = _Frame(min(xs), max(xs), min(ys), max(ys))
    parts = fr.axes(title, xlabel, ylabel)
    for i, (x, y) in enumerate(pts):
        c = 0.5 if colors is None else min(max(colors[i], 0.0), 1.0)
        fill = f"rgb({int(255 * c)},60,{int(255 * (1 - c))})"
        parts.append(f'<circle cx="{fr.x(x):.2f}" cy="{fr.y(y):.2f}" r="2.5" fill="{fill}" fill-opacity="0.6"/>')
    for text, x, y in labels:
        parts.append(f'<text x="{fr.x(x):.2f}" y="{fr.y(y):.2f}" text-anchor="middle" font-size="12" '
                     f'font-weight="bold" stroke="white" stroke-width="3" paint-order="stroke">{escape(text)}</text>')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_doc(parts))
