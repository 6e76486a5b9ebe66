"""Deterministic SVG rendering of cylinder tilings.

The unit strip [0, 1) x [0, 1] maps to a `size` x `size` canvas with
w increasing rightward and heights increasing upward.  Rectangles that
cross the circular seam are split in two.  Output is a pure function
of the tiling's numbers: same tiling, byte-identical SVG.
"""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr


def _f(x) -> str:
    s = f"{float(x):.6f}"
    return "0.000000" if s == "-0.000000" else s


def _color(e: int, m: int) -> str:
    # fixed palette walk; golden-angle hue keeps neighbours distinct
    hue = (e * 137) % 360
    light = 82 - 10 * ((e * 7) % 3)
    return f"hsl({hue},42%,{light}%)"


def _seam_split(w_start: float, width: float):
    w0 = w_start % 1.0
    if width >= 1.0:
        yield 0.0, 1.0
    elif w0 + width <= 1.0:
        yield w0, width
    else:
        yield w0, 1.0 - w0
        yield 0.0, w0 + width - 1.0


def render_svg(tiling, *, size: float = 1000.0, stroke: str = "#333333",
               stroke_width: float = 1.0, fill: bool = True,
               intervals: bool = True) -> str:
    """Render a tiling to an SVG string."""
    g = tiling.graph
    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(size)}" '
        f'height="{_f(size)}" viewBox="0 0 {_f(size)} {_f(size)}">')
    degenerate = sum(1 for r in tiling.rectangles if r.degenerate)
    out.append(f'<!-- edges: {g.m}, degenerate (not drawn): {degenerate} -->')
    out.append(f'<rect x="0" y="0" width="{_f(size)}" height="{_f(size)}" '
               'fill="white" stroke="none"/>')
    for e, r in enumerate(tiling.rectangles):
        if r.degenerate or r.width <= 0.0 or r.h_high <= r.h_low:
            continue
        paint = _color(e, g.m) if fill else "none"
        y = (1.0 - r.h_high) * size
        hh = (r.h_high - r.h_low) * size
        for w0, wd in _seam_split(r.w_start, r.width):
            out.append(
                f'<rect x="{_f(w0 * size)}" y="{_f(y)}" '
                f'width="{_f(wd * size)}" height="{_f(hh)}" '
                f'fill={quoteattr(paint)} stroke={quoteattr(stroke)} '
                f'stroke-width="{_f(stroke_width)}">'
                f'<title>{escape(str(r.edge_id))}</title></rect>')
    if intervals:
        for iv in tiling.vertex_intervals:
            if iv.width <= 0.0:
                continue
            y = (1.0 - iv.height) * size
            for w0, wd in _seam_split(iv.w_start, iv.width):
                out.append(
                    f'<line x1="{_f(w0 * size)}" y1="{_f(y)}" '
                    f'x2="{_f((w0 + wd) * size)}" y2="{_f(y)}" '
                    'stroke="#000000" stroke-width="2.5">'
                    f'<title>{escape(str(iv.vertex_id))}</title></line>')
    out.append(f'<rect x="0" y="0" width="{_f(size)}" height="{_f(size)}" '
               'fill="none" stroke="#000000" stroke-width="1"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
