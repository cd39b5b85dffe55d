"""Deterministic SVG figures: correlation heatmap, scree plot, confusion tiles, enrichment bars.

The markup is assembled by hand so identical inputs give byte-identical
files; every number is written with a fixed precision.
"""

from __future__ import annotations

import math

FONT = "font-family=\"Helvetica, Arial, sans-serif\""


def _esc(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _f(x):
    # fixed two-decimal coordinates; avoids "-0.00"
    s = f"{x:.2f}"
    return "0.00" if s == "-0.00" else s


def _open(width, height, title, meta=None):
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{_esc(title)}</title>",
    ]
    if meta:
        lines.append(f"<desc>{_esc(meta)}</desc>")
    lines.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>')
    return lines


def _text(x, y, s, size=12, anchor="middle", extra=""):
    return (
        f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}" {FONT}{extra}>'
        f"{_esc(s)}</text>"
    )


def _mix(c0, c1, t):
    t = min(1.0, max(0.0, t))
    return "#" + "".join(f"{round(a + (b - a) * t):02x}" for a, b in zip(c0, c1))


WHITE = (255, 255, 255)
RED = (178, 24, 43)
BLUE = (33, 102, 172)
TILE = (8, 48, 107)


def diverging_color(r):
    """White at 0, saturated red at +1 and blue at -1."""
    return _mix(WHITE, RED, r) if r >= 0 else _mix(WHITE, BLUE, -r)


def emit_svg_heatmap(corr, meta=None):
    labels = list(corr.labels)
    m = len(labels)
    cell = 56
    left, top = 170, 60
    width = left + m * cell + 30
    height = top + m * cell + 150
    out = _open(width, height, "Correlation matrix", meta)
    out.append(_text(width / 2, 30, "Correlation matrix (Pearson r)", 16))
    for i in range(m):
        y = top + i * cell
        out.append(_text(left - 8, y + cell / 2 + 4, labels[i], 11, "end"))
        for j in range(m):
            x = left + j * cell
            r = float(corr.r[i, j])
            out.append(
                f'<rect x="{_f(x)}" y="{_f(y)}" width="{cell}" height="{cell}" '
                f'fill="{diverging_color(r)}" stroke="#ffffff" stroke-width="1"/>'
            )
            ink = "#ffffff" if abs(r) > 0.6 else "#000000"
            out.append(_text(x + cell / 2, y + cell / 2 + 4, f"{r:.2f}", 11, extra=f' fill="{ink}"'))
    base = top + m * cell + 10
    for j in range(m):
        x = left + j * cell + cell / 2
        out.append(
            f'<text x="{_f(x)}" y="{_f(base)}" font-size="11" text-anchor="end" {FONT} '
            f'transform="rotate(-45 {_f(x)} {_f(base)})">{_esc(labels[j])}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_scree(model, meta=None):
    """Cumulative explained variance against component index."""
    cum = [float(c) for c in model.cumulative_fraction]
    frac = [float(c) for c in model.explained_fraction]
    m = len(cum)
    width, height = 640, 420
    left, right, top, bottom = 70, 30, 50, 60
    pw, ph = width - left - right, height - top - bottom
    out = _open(width, height, "Cumulative variance explained", meta)
    out.append(_text(width / 2, 28, "Cumulative variance explained", 16))

    def sx(i):
        return left + pw * (i + 0.5) / m

    def sy(v):
        return top + ph * (1.0 - v)

    out.append(
        f'<line x1="{left}" y1="{_f(top + ph)}" x2="{left + pw}" y2="{_f(top + ph)}" stroke="#000000"/>'
    )
    out.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{_f(top + ph)}" stroke="#000000"/>')
    for tick in range(0, 11, 2):
        v = tick / 10
        out.append(_text(left - 8, sy(v) + 4, f"{tick * 10}%", 10, "end"))
        out.append(
            f'<line x1="{left}" y1="{_f(sy(v))}" x2="{left + pw}" y2="{_f(sy(v))}" '
            f'stroke="#dddddd" stroke-width="0.5"/>'
        )
    bar_w = pw / m * 0.5
    for i, f in enumerate(frac):
        out.append(
            f'<rect x="{_f(sx(i) - bar_w / 2)}" y="{_f(sy(f))}" width="{_f(bar_w)}" '
            f'height="{_f(ph * f)}" fill="#c6dbef"/>'
        )
        out.append(_text(sx(i), top + ph + 18, str(i + 1), 11))
    if m > 1:
        pts = " ".join(f"{_f(sx(i))},{_f(sy(c))}" for i, c in enumerate(cum))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#08519c" stroke-width="2"/>')
    for i, c in enumerate(cum):
        out.append(f'<circle cx="{_f(sx(i))}" cy="{_f(sy(c))}" r="4" fill="#08519c"/>')
        out.append(_text(sx(i), sy(c) - 10, f"{100 * c:.1f}%", 10))
    out.append(_text(left + pw / 2, height - 18, "Principal component", 12))
    out.append(
        f'<text x="18" y="{_f(top + ph / 2)}" font-size="12" text-anchor="middle" {FONT} '
        f'transform="rotate(-90 18 {_f(top + ph / 2)})">Variance explained</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_confusion(cm, meta=None):
    """2x2 tiles, rows = actual class, columns = predicted class."""
    cell = 130
    left, top = 140, 70
    width, height = left + 2 * cell + 40, top + 2 * cell + 70
    grid = [[("TN", cm.tn), ("FP", cm.fp)], [("FN", cm.fn), ("TP", cm.tp)]]
    peak = max(cm.tn, cm.fp, cm.fn, cm.tp, 1)
    out = _open(width, height, "Confusion matrix", meta)
    out.append(_text(width / 2, 30, "Confusion matrix", 16))
    for i, row in enumerate(grid):
        for j, (tag, count) in enumerate(row):
            x, y = left + j * cell, top + i * cell
            t = count / peak
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_mix(WHITE, TILE, t)}" '
                f'stroke="#ffffff" stroke-width="2"/>'
            )
            ink = "#ffffff" if t > 0.5 else "#000000"
            out.append(_text(x + cell / 2, y + cell / 2 + 4, str(count), 22, extra=f' fill="{ink}"'))
            out.append(_text(x + cell / 2, y + cell / 2 + 26, tag, 11, extra=f' fill="{ink}"'))
    for j, lab in enumerate(("Predicted 0", "Predicted 1")):
        out.append(_text(left + j * cell + cell / 2, top - 10, lab, 12))
    for i, lab in enumerate(("Actual 0", "Actual 1")):
        out.append(_text(left - 10, top + i * cell + cell / 2 + 4, lab, 12, "end"))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_enrichment(results, meta=None, top_n=15):
    """Horizontal bars of -log10(adjusted p) for the top pathways."""
    width = 720
    if not results:
        height = 200
        out = _open(width, height, "Top enriched pathways", meta)
        out.append(_text(width / 2, height / 2, "no enriched pathways", 14))
        out.append("</svg>")
        return "\n".join(out) + "\n"
    rows = list(results)[:top_n]
    bar_h, gap = 24, 8
    left, right, top = 300, 70, 60
    height = top + len(rows) * (bar_h + gap) + 60
    pw = width - left - right
    scores = [-math.log10(max(r.p_adjusted, 1e-300)) for r in rows]
    peak = max(max(scores), 1e-12)
    out = _open(width, height, "Top enriched pathways", meta)
    out.append(_text(width / 2, 30, "Top enriched pathways", 16))
    for i, (r, s) in enumerate(zip(rows, scores)):
        y = top + i * (bar_h + gap)
        w = pw * s / peak
        name = r.name.split(" - ")[0]
        out.append(_text(left - 8, y + bar_h / 2 + 4, name, 11, "end"))
        out.append(
            f'<rect x="{left}" y="{_f(y)}" width="{_f(w)}" height="{bar_h}" fill="#d95f0e"/>'
        )
        out.append(_text(left + w + 6, y + bar_h / 2 + 4, f"{r.k}/{r.K}", 10, "start"))
    axis_y = top + len(rows) * (bar_h + gap)
    out.append(
        f'<line x1="{left}" y1="{_f(axis_y)}" x2="{left + pw}" y2="{_f(axis_y)}" stroke="#000000"/>'
    )
    out.append(_text(left, axis_y + 16, "0", 10))
    out.append(_text(left + pw, axis_y + 16, f"{peak:.1f}", 10))
    out.append(_text(left + pw / 2, axis_y + 36, "-log10(adjusted p)", 12))
    out.append("</svg>")
    return "\n".join(out) + "\n"
