"""Static output: SVG drawings of bodies in dimension <= 2, CSV elsewhere, atomic file writes."""

from __future__ import annotations

import math
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from oklab.errors import DimensionError
from oklab.polytope import RatPolytope, fmt_rational

SIZE = 400
PAD = 30
COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cyclic_vertices(P: RatPolytope) -> list[tuple[float, float]]:
    """Vertices of a polygon in counterclockwise order."""
    pts = [tuple(float(c) for c in v) for v in P.vertices]
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


class _Frame:
    def __init__(self, points: np.ndarray):
        self.lo = points.min(axis=0)
        span = points.max(axis=0) - self.lo
        self.scale = (SIZE - 2 * PAD) / max(float(span.max()), 1e-12)

    def __call__(self, x: float, y: float) -> tuple[str, str]:
        sx = PAD + (x - self.lo[0]) * self.scale
        sy = SIZE - PAD - (y - self.lo[1]) * self.scale
        return f"{sx:.3f}", f"{sy:.3f}"


def _lift(points: np.ndarray) -> np.ndarray:
    """Draw 1-D data on the horizontal axis."""
    if points.shape[1] == 1:
        return np.hstack([points, np.zeros((len(points), 1))])
    return points


def bodies_svg(bodies: Sequence[tuple[str, RatPolytope]]) -> str:
    """Overlay of polytopes in dimension 1 or 2, one color per label."""
    if not bodies:
        raise DimensionError("nothing to draw")
    n = bodies[0][1].n
    if n > 2 or any(P.n != n for _, P in bodies):
        raise DimensionError("SVG output needs polytopes of a common dimension <= 2")
    allpts = _lift(np.array([[float(c) for c in v] for _, P in bodies for v in P.vertices]))
    frame = _Frame(np.vstack([allpts, np.zeros((1, 2))]))
    out = [_header()]
    for i, (label, P) in enumerate(bodies):
        color = COLORS[i % len(COLORS)]
        if n == 2 and P.dim == 2:
            pts = " ".join(",".join(frame(x, y)) for x, y in cyclic_vertices(P))
            out.append(f'<polygon points="{pts}" fill="{color}" fill-opacity="0.15" stroke="{color}"/>')
        else:
            verts = _lift(np.array([[float(c) for c in v] for v in P.vertices]))
            a, b = verts.min(axis=0), verts.max(axis=0)
            (x1, y1), (x2, y2) = frame(*a), frame(*b)
            out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" stroke-width="2"/>')
        tx, ty = PAD, 16 + 14 * i
        out.append(f'<text x="{tx}" y="{ty}" font-size="12" fill="{color}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def points_svg(points: np.ndarray, hull: RatPolytope | None = None, label: str = "") -> str:
    """Scatter of moment-map samples, optionally over the outline of Conv(A)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] > 2:
        raise DimensionError("SVG scatter needs points in dimension <= 2")
    pts = _lift(points)
    ref = pts
    if hull is not None:
        ref = np.vstack([pts, _lift(np.array([[float(c) for c in v] for v in hull.vertices]))])
    frame = _Frame(ref)
    out = [_header()]
    if hull is not None and hull.n == 2 and hull.dim == 2:
        poly = " ".join(",".join(frame(x, y)) for x, y in cyclic_vertices(hull))
        out.append(f'<polygon points="{poly}" fill="none" stroke="{COLORS[3]}"/>')
    for x, y in pts:
        cx, cy = frame(x, y)
        out.append(f'<circle cx="{cx}" cy="{cy}" r="1" fill="{COLORS[0]}"/>')
    if label:
        out.append(f'<text x="{PAD}" y="16" font-size="12">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def polytope_csv(P: RatPolytope) -> str:
    """kind,c1..cn,rhs rows: vertices (rhs empty) then facets a.x <= b."""
    head = ",".join(["kind"] + [f"c{i + 1}" for i in range(P.n)] + ["rhs"])
    rows = [head]
    for v in P.vertices:
        rows.append(",".join(["vertex"] + [fmt_rational(c) for c in v] + [""]))
    for nrm, off in P.facets:
        rows.append(",".join(["facet"] + [str(a) for a in nrm] + [fmt_rational(off)]))
    return "\n".join(rows) + "\n"


def points_csv(points: np.ndarray, names: Sequence[str] | None = None) -> str:
    points = np.asarray(points, dtype=float)
    names = names or [f"y{i + 1}" for i in range(points.shape[1])]
    rows = [",".join(names)]
    rows += [",".join(f"{v:.12g}" for v in p) for p in points]
    return "\n".join(rows) + "\n"


def _header() -> str:
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">\n<rect width="100%" height="100%" fill="white"/>'
    )


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
