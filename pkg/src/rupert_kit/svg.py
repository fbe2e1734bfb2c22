"""Minimal SVG 1.1 output for shadows and cross-section rectangles."""

from __future__ import annotations

from xml.sax.saxutils import quoteattr

import numpy as np

from .geom import ConvexPolygon, RectPlacement


def inset_polygon(poly: ConvexPolygon, margin: float) -> np.ndarray:
    """Vertices of ``{x : n_i . x >= offset_i + margin}`` (the polygon shrunk by ``margin``)."""
    n = poly.inward_normals
    d = poly.offsets + margin
    out = []
    for i in range(len(n)):
        j = (i + 1) % len(n)
        m = np.array([n[i], n[j]])
        if abs(np.linalg.det(m)) < 1e-15:
            continue
        out.append(np.linalg.solve(m, [d[i], d[j]]))
    return np.array(out)


def _points(pts) -> str:
    return " ".join(f"{x:.17g},{y:.17g}" for x, y in pts)


def render(
    poly: ConvexPolygon,
    rect: RectPlacement | None = None,
    clearance: float | None = None,
    title: str = "",
    size: int = 480,
) -> str:
    v = poly.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    span = float(max(hi - lo))
    pad = 0.05 * span
    x0, y0 = lo[0] - pad, -(hi[1] + pad)
    w, h = (hi[0] - lo[0]) + 2 * pad, (hi[1] - lo[1]) + 2 * pad
    stroke = span / 400.0
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="{x0:.17g} {y0:.17g} {w:.17g} {h:.17g}">',
    ]
    if title:
        parts.append(f"<title>{title}</title>")
    # flip y so the picture uses mathematical orientation
    parts.append('<g transform="scale(1,-1)">')
    parts.append(
        f'<polygon points={quoteattr(_points(v))} fill="none" stroke="black" stroke-width="{stroke:.6g}"/>'
    )
    if clearance is not None and clearance > 0:
        inner = inset_polygon(poly, clearance)
        parts.append(
            f'<polygon points={quoteattr(_points(inner))} fill="none" stroke="gray" '
            f'stroke-dasharray="{4 * stroke:.6g}" stroke-width="{stroke / 2:.6g}"/>'
        )
    if rect is not None:
        parts.append(
            f'<polygon points={quoteattr(_points(rect.corners()))} fill="steelblue" fill-opacity="0.3" '
            f'stroke="steelblue" stroke-width="{stroke:.6g}"/>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
