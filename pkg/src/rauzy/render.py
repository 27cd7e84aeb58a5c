"""SVG drawing of the level-n triangles."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from rauzy import kernels
from rauzy.oracle import ENUMERATION_CAP, check_cap

# corners of the simplex in the picture: e1 on top, e2 bottom left, e3 bottom right
_H = math.sqrt(3) / 2


def _corners(size: float, pad: float) -> np.ndarray:
    w = size - 2 * pad
    return np.array([
        [pad + w / 2, pad],
        [pad, pad + w * _H],
        [pad + w, pad + w * _H],
    ])


def level_polygons(n: int, size: float = 800.0, pad: float = 10.0, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Plane coordinates (3**n, 3, 2) of every level-n triangle, in word order."""
    check_cap(n, cap)
    mats = kernels.level_matrices(n).astype(np.float64)
    bary = mats / mats.sum(axis=1, keepdims=True)  # columns are vertices
    return np.einsum("kjc,jd->kcd", bary, _corners(size, pad))


def render_svg(n: int, size: float = 800.0, pad: float = 10.0, fill: str = "#1f3b73",
               cap: int = ENUMERATION_CAP) -> str:
    polys = level_polygons(n, size, pad, cap)
    height = pad * 2 + (size - 2 * pad) * _H
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" height="{height:.3f}" '
        f'viewBox="0 0 {size:.3f} {height:.3f}">',
        f"<title>{escape(f'Rauzy gasket, level {n}')}</title>",
        f'<g fill="{escape(fill)}" stroke="none">',
    ]
    for tri in polys:
        pts = " ".join(f"{x:.4f},{y:.4f}" for x, y in tri)
        lines.append(f'<polygon points="{pts}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def write_svg(n: int, target, **kw) -> None:
    text = render_svg(n, **kw)
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(text)
