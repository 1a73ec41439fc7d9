"""Minimal SVG scatter plots with least-squares trend lines."""

from __future__ import annotations

import itertools
import math
from html import escape
from pathlib import Path
from typing import Mapping, Sequence

from .metrics import ComplexityProfile

WIDTH, HEIGHT = 480, 360
MARGIN = 56
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def least_squares(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float] | None:
    """(slope, intercept), or None when x has no spread."""
    n = len(xs)
    if n < 2:
        return None
    mx, my = math.fsum(xs) / n, math.fsum(ys) / n
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    if sxx == 0:
        return None
    slope = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return slope, my - slope * mx


def _bounds(values: Sequence[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def scatter_svg(series: Mapping[str, Sequence[tuple[float, float]]], title: str,
                xlabel: str, ylabel: str, diagonal: bool = False) -> str:
    """Render named point series; each series gets its own trend line."""
    pts = [p for s in series.values() for p in s]
    if not pts:
        xs_all, ys_all = [0.0], [0.0]
    else:
        xs_all, ys_all = [p[0] for p in pts], [p[1] for p in pts]
    if diagonal:
        xs_all = ys_all = xs_all + ys_all
    x0, x1 = _bounds(xs_all)
    y0, y1 = _bounds(ys_all)

    def sx(x):
        return MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(y):
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
           f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
           f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 16}" text-anchor="middle">{escape(xlabel)}</text>',
           f'<text x="16" y="{HEIGHT / 2:.1f}" text-anchor="middle" '
           f'transform="rotate(-90 16 {HEIGHT / 2:.1f})">{escape(ylabel)}</text>']
    for v, anchor in ((x0, "start"), (x1, "end")):
        out.append(f'<text x="{sx(v):.1f}" y="{HEIGHT - MARGIN + 14}" text-anchor="{anchor}">{v:.3g}</text>')
    for v in (y0, y1):
        out.append(f'<text x="{MARGIN - 4}" y="{sy(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    if diagonal:
        lo, hi = max(x0, y0), min(x1, y1)
        out.append(f'<line class="diagonal" x1="{sx(lo):.1f}" y1="{sy(lo):.1f}" x2="{sx(hi):.1f}" '
                   f'y2="{sy(hi):.1f}" stroke="grey" stroke-dasharray="4 3"/>')
    for i, (name, points) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<g class="series" data-name="{escape(name)}">')
        for x, y in points:
            out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3.5" fill="{color}"/>')
        fit = least_squares([p[0] for p in points], [p[1] for p in points])
        if fit is not None:
            slope, icept = fit
            out.append(f'<line class="trend" data-slope="{slope!r}" x1="{sx(x0):.1f}" '
                       f'y1="{sy(slope * x0 + icept):.1f}" x2="{sx(x1):.1f}" '
                       f'y2="{sy(slope * x1 + icept):.1f}" stroke="{color}"/>')
        out.append("</g>")
        out.append(f'<text x="{WIDTH - MARGIN + 4}" y="{MARGIN + 14 * i}" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(out_dir, L: Mapping[tuple[str, str], float],
               profiles: Mapping[str, ComplexityProfile], methods: Sequence[str]) -> list[Path]:
    """L vs MATTR for every method, plus one L-vs-L plot per method pair."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    series = {m: [(profiles[lang].mattr, v) for (lang, mm), v in sorted(L.items())
                  if mm == m and lang in profiles] for m in methods}
    path = out_dir / "surprisal_vs_mattr.svg"
    path.write_text(scatter_svg(series, "Surprisal per verse vs MATTR", "MATTR", "L (bits)"),
                    encoding="utf-8")
    written.append(path)
    for a, b in itertools.combinations(methods, 2):
        pts = [(L[(lang, a)], L[(lang, b)]) for lang in sorted(profiles)
               if (lang, a) in L and (lang, b) in L]
        path = out_dir / f"pairwise_{a}_vs_{b}.svg"
        path.write_text(scatter_svg({f"{a} vs {b}": pts}, f"Surprisal per verse: {a} vs {b}",
                                    f"L {a} (bits)", f"L {b} (bits)", diagonal=True),
                        encoding="utf-8")
        written.append(path)
    return written
