"""Deterministic CSV, JSON and SVG artifacts."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .boundaries import FLAG_NAMES, DiagramGrid

__all__ = ["emit_grid", "emit_json", "emit_plot", "emit_polylines", "fmt", "grid_csv", "plot_svg"]

# layer colours; the SVG is drawn from scratch without external assets
COLORS = {
    "exists": "#dfe8f5",
    "eckhaus": "#9ccc65",
    "zigzag": "#ff9800",
    "square": "#e53935",
    "rectangle": "#ff7043",
    "rectangle_finite": "#d84315",
    "hex": "#ec407a",
    "quasihex": "#9e9e9e",
    "rhomb": "#f48fb1",
    "stable": "#ffffff",
}
LINE_COLORS = ("#1565c0", "#2e7d32", "#c62828", "#6a1b9a", "#ef6c00", "#00838f", "#4e342e", "#283593")


def fmt(value) -> str:
    """Shortest decimal with at most 12 significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    return f"{v:.12g}"


def grid_csv(grid: DiagramGrid, extra_flags=()) -> str:
    """CSV text: header ``x,y,<flags>``, rows in row-major order (``y`` outer)."""
    names = list(FLAG_NAMES) + [n for n in extra_flags if n not in FLAG_NAMES]
    lines = [",".join(["x", "y", *names])]
    for iy, y in enumerate(grid.y):
        for ix, x in enumerate(grid.x):
            lines.append(",".join([fmt(x), fmt(y)] + [fmt(bool(grid.flags[n][iy, ix])) for n in names]))
    return "\n".join(lines) + "\n"


def _write(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def emit_grid(grid: DiagramGrid, path, extra_flags=()) -> Path:
    return _write(path, grid_csv(grid, extra_flags))


def emit_polylines(grid: DiagramGrid, path) -> Path:
    """Boundary curves as ``name,x,y`` rows (NaN where the formula is invalid)."""
    lines = ["name,x,y"]
    for name in sorted(grid.polylines):
        xs, ys = grid.polylines[name]
        for x, y in zip(np.asarray(xs).ravel(), np.asarray(ys).ravel()):
            lines.append(f"{name},{fmt(x)},{fmt(y)}")
    return _write(path, "\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _jsonable(obj.real), "im": _jsonable(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return fmt(v) if not math.isfinite(v) else float(fmt(v))
    return obj


def emit_json(data, path) -> Path:
    return _write(path, json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def _scale(lo, hi, a, b):
    span = hi - lo if hi > lo else 1.0
    return lambda v: a + (v - lo) / span * (b - a)


def plot_svg(grid: DiagramGrid, layers=None, width: int = 640, height: int = 480) -> str:
    """SVG text with one group per flag layer, boundary paths and a legend."""
    layers = [n for n in (layers or grid.flags) if n in grid.flags and n != "marginal"]
    margin, legend_w = 50, 150
    x0, x1, y0, y1 = margin, width - legend_w, height - margin, margin
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>']
    xs, ys = np.asarray(grid.x, float), np.asarray(grid.y, float)
    if xs.size and ys.size:
        xlo, xhi, ylo, yhi = xs.min(), xs.max(), ys.min(), ys.max()
        sx, sy = _scale(xlo, xhi, x0, x1), _scale(ylo, yhi, y0, y1)
        dx = (x1 - x0) / max(len(xs) - 1, 1)
        dy = (y0 - y1) / max(len(ys) - 1, 1)
        for name in layers:
            color = COLORS.get(name, "#bdbdbd")
            opacity = "1" if name in ("exists", "stable") else "0.55"
            out.append(f'<g id="layer-{name}" fill="{color}" fill-opacity="{opacity}">')
            mask = np.asarray(grid.flags[name], bool)
            for iy, ix in zip(*np.nonzero(mask)):
                out.append(f'<rect x="{sx(xs[ix]) - dx / 2:.3f}" y="{sy(ys[iy]) - dy / 2:.3f}" '
                           f'width="{dx:.3f}" height="{dy:.3f}"/>')
            out.append("</g>")
        out.append('<g id="boundaries" fill="none" stroke-width="1.5">')
        for k, name in enumerate(sorted(grid.polylines)):
            px, py = (np.asarray(v, float).ravel() for v in grid.polylines[name])
            segs, cur = [], []
            for a, b in zip(px, py):
                if np.isfinite(a) and np.isfinite(b) and ylo <= b <= yhi:
                    cur.append(f"{sx(a):.3f},{sy(b):.3f}")
                elif cur:
                    segs.append(cur)
                    cur = []
            if cur:
                segs.append(cur)
            d = " ".join("M" + " L".join(s) for s in segs if len(s) > 1)
            if d:
                out.append(f'<path id="curve-{name}" d="{d}" stroke="{LINE_COLORS[k % len(LINE_COLORS)]}"/>')
        out.append("</g>")
    out.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="#000000"/>')
    out.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="14">'
               f'{grid.x_label}</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" font-size="14" '
               f'transform="rotate(-90 14 {(y0 + y1) / 2:.1f})">{grid.y_label}</text>')
    if xs.size and ys.size:
        for v, anchor, px_, py_ in ((xs.min(), "start", x0, y0 + 16), (xs.max(), "end", x1, y0 + 16)):
            out.append(f'<text x="{px_}" y="{py_}" text-anchor="{anchor}" font-size="11">{fmt(v)}</text>')
        for v, py_ in ((ys.min(), y0), (ys.max(), y1 + 10)):
            out.append(f'<text x="{x0 - 4}" y="{py_}" text-anchor="end" font-size="11">{fmt(v)}</text>')
    out.append('<g id="legend" font-size="12">')
    ly = margin
    for name in layers:
        out.append(f'<rect x="{x1 + 15}" y="{ly}" width="14" height="14" fill="{COLORS.get(name, "#bdbdbd")}" '
                   f'stroke="#000000"/>')
        out.append(f'<text x="{x1 + 35}" y="{ly + 12}">{name}</text>')
        ly += 20
    for k, name in enumerate(sorted(grid.polylines)):
        out.append(f'<line x1="{x1 + 15}" y1="{ly + 7}" x2="{x1 + 29}" y2="{ly + 7}" '
                   f'stroke="{LINE_COLORS[k % len(LINE_COLORS)]}" stroke-width="2"/>')
        out.append(f'<text x="{x1 + 35}" y="{ly + 12}">{name}</text>')
        ly += 20
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(grid: DiagramGrid, path, layers=None) -> Path:
    return _write(path, plot_svg(grid, layers))
