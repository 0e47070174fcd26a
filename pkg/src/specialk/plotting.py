"""Frequency scatter plots as standalone SVG.

One panel per (shape, preset): x is the swept parameter, y the selected
k, and the marker radius grows with how many replicates chose that k.
Output is plain text with fixed formatting, so reruns are byte-identical.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from xml.sax.saxutils import escape

PANEL_W, PANEL_H = 260, 180
MARGIN = 40


def _panel(x0, y0, title, points, x_values, k_max, truth_k=None):
    out = []
    w, h = PANEL_W - 2 * MARGIN, PANEL_H - 2 * MARGIN
    xs = sorted(set(x_values))
    lo, hi = (xs[0], xs[-1]) if xs else (0.0, 1.0)
    span = hi - lo or 1.0

    def px(x):
        return x0 + MARGIN + (x - lo) / span * w

    def py(k):
        return y0 + MARGIN + h - (k - 0.5) / (k_max + 0.1) * h

    out.append(f'<text x="{x0 + PANEL_W / 2:.1f}" y="{y0 + 18:.1f}" text-anchor="middle" '
               f'font-size="12">{escape(title)}</text>')
    if truth_k is not None:
        out.append(f'<rect x="{x0 + MARGIN:.1f}" y="{py(truth_k + 0.5):.1f}" width="{w:.1f}" '
                   f'height="{py(truth_k - 0.5) - py(truth_k + 0.5):.1f}" fill="#f4c2d7" opacity="0.5"/>')
    out.append(f'<line x1="{x0 + MARGIN}" y1="{y0 + MARGIN + h}" x2="{x0 + MARGIN + w}" '
               f'y2="{y0 + MARGIN + h}" stroke="black"/>')
    out.append(f'<line x1="{x0 + MARGIN}" y1="{y0 + MARGIN}" x2="{x0 + MARGIN}" '
               f'y2="{y0 + MARGIN + h}" stroke="black"/>')
    for k in range(1, k_max + 1):
        out.append(f'<text x="{x0 + MARGIN - 6}" y="{py(k) + 4:.1f}" text-anchor="end" '
                   f'font-size="10">{k}</text>')
    for x in xs:
        out.append(f'<text x="{px(x):.1f}" y="{y0 + MARGIN + h + 14:.1f}" text-anchor="middle" '
                   f'font-size="8">{x:g}</text>')
    for (x, k), count in sorted(points.items()):
        out.append(f'<circle cx="{px(x):.1f}" cy="{py(k):.1f}" r="{1.5 + 1.5 * count:.1f}" '
                   f'fill="#c2185b" fill-opacity="0.45" stroke="#880e4f"/>')
    return out


TRUE_K = {"moons": 2, "circles": 2, "blobs": 3, "random": 1}


def sweep_svg(rows, x_field: str = "noise", k_max: int = 5) -> str:
    """Render sweep rows (dicts with shape, preset, x_field, k_selected)."""
    groups = defaultdict(Counter)
    xvals = defaultdict(list)
    for r in rows:
        key = (r["shape"], r["preset"])
        x = float(r[x_field])
        xvals[key].append(x)
        if r["k_selected"] not in ("", None):
            groups[key][(x, int(r["k_selected"]))] += 1
    shapes = sorted({k[0] for k in xvals})
    presets = sorted({k[1] for k in xvals}, key=lambda p: ("wr", "wc").index(p) if p in ("wr", "wc") else 9)
    width = PANEL_W * max(1, len(presets))
    height = PANEL_H * max(1, len(shapes))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             '<rect width="100%" height="100%" fill="white"/>']
    for i, shape in enumerate(shapes):
        for j, preset in enumerate(presets):
            key = (shape, preset)
            if key not in xvals:
                continue
            parts += _panel(j * PANEL_W, i * PANEL_H, f"{shape} / {preset.upper()}", groups[key],
                            xvals[key], k_max, TRUE_K.get(shape))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
