"""Rasterized thickness estimates for finite unions of convex cells in the plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from .cantor import INF

Polygon = Sequence[tuple[float, float]]


@dataclass(frozen=True)
class ThicknessEstimate:
    """Rasterized thickness with a one-pixel error bar.

    ``squared`` is the exact rational (dist/diam)**2 in pixel units, or None
    for the infinite and zero cases.
    """

    value: float
    error: float
    squared: Fraction | None
    gaps: int
    resolution: int
    metric: str

    def to_json(self) -> dict:
        return {
            "value": "inf" if self.value == INF else self.value,
            "error": self.error,
            "gaps": self.gaps,
            "resolution": self.resolution,
            "metric": self.metric,
        }


def rasterize(cells: Sequence[Polygon], resolution: int) -> tuple[np.ndarray, float]:
    """Boolean mask of pixel centres inside the union, with a one-pixel margin.

    The bounding box of the union is divided into ``resolution`` pixels along
    its longer side; returns the mask and the pixel size.
    """
    pts = np.array([p for c in cells for p in c], dtype=float)
    x0, y0 = pts.min(axis=0)
    x1, y1 = pts.max(axis=0)
    h = max(x1 - x0, y1 - y0) / resolution
    nx = int(math.ceil((x1 - x0) / h - 1e-9)) + 2
    ny = int(math.ceil((y1 - y0) / h - 1e-9)) + 2
    ox, oy = x0 - h, y0 - h
    mask = np.zeros((ny, nx), dtype=bool)
    for cell in cells:
        c = np.asarray(cell, dtype=float)
        i0 = max(int((c[:, 0].min() - ox) / h) - 1, 0)
        i1 = min(int((c[:, 0].max() - ox) / h) + 2, nx)
        j0 = max(int((c[:, 1].min() - oy) / h) - 1, 0)
        j1 = min(int((c[:, 1].max() - oy) / h) + 2, ny)
        jj, ii = np.mgrid[j0:j1, i0:i1]
        px, py = ox + (ii + 0.5) * h, oy + (jj + 0.5) * h
        pos = np.ones(px.shape, dtype=bool)
        neg = np.ones(px.shape, dtype=bool)
        for k in range(len(c)):
            ax, ay = c[k]
            bx, by = c[(k + 1) % len(c)]
            cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            pos &= cross >= 0
            neg &= cross <= 0
        mask[j0:j1, i0:i1] |= pos | neg
    return mask, h


def _pixel_diameter2(pix: np.ndarray, metric: str) -> int:
    """Squared diameter of a union of unit pixels given by their integer centres."""
    corners = np.concatenate([pix + d for d in ((0, 0), (0, 1), (1, 0), (1, 1))])
    corners = np.unique(corners, axis=0)
    if len(corners) > 16:
        try:
            corners = corners[ConvexHull(corners).vertices]
        except QhullError:
            pass
    diff = np.abs(corners[:, None, :] - corners[None, :, :])
    if metric == "chebyshev":
        return int(diff.max()) ** 2
    return int((diff ** 2).sum(axis=2).max())


def _gap_distance2(pix: np.ndarray, obstacle: np.ndarray, metric: str) -> int:
    """Squared distance between pixel squares of a gap and an obstacle mask."""
    dist, idx = ndimage.distance_transform_edt(~obstacle, return_indices=True)
    rows, cols = pix[:, 0], pix[:, 1]
    k = int(np.argmin(dist[rows, cols]))
    r, c = rows[k], cols[k]
    orow, ocol = idx[0][r, c], idx[1][r, c]
    dy = max(abs(int(orow) - int(r)) - 1, 0)
    dx = max(abs(int(ocol) - int(c)) - 1, 0)
    if metric == "chebyshev":
        return max(dx, dy) ** 2
    return dx * dx + dy * dy


def thickness_2d_estimate(cells: Sequence[Polygon], resolution: int = 256,
                          metric: str = "euclidean") -> ThicknessEstimate:
    """Thickness of a union of convex cells, estimated on a pixel grid.

    Bounded complement components (4-adjacency) are ordered by non-increasing
    diameter; each contributes dist(G, earlier gaps or the outer component)
    / diam(G), with pixels treated as closed squares.  The reported error is
    the effect of moving each measured length by one pixel.
    """
    if not cells:
        raise ValueError("no cells")
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    if metric not in ("euclidean", "chebyshev"):
        raise ValueError("metric must be 'euclidean' or 'chebyshev'")
    mask, h = rasterize(cells, resolution)
    labels, count = ndimage.label(~mask)
    border = set(np.unique(np.concatenate([labels[0], labels[-1], labels[:, 0], labels[:, -1]]))) - {0}
    inner = [k for k in range(1, count + 1) if k not in border]
    if not inner:
        value = INF if mask.any() else 0.0
        return ThicknessEstimate(value, 0.0, None, 0, resolution, metric)
    slices = ndimage.find_objects(labels)
    comps = []
    for k in inner:
        sl = slices[k - 1]
        local = np.argwhere(labels[sl] == k) + np.array([sl[0].start, sl[1].start])
        comps.append((k, local, _pixel_diameter2(local, metric)))
    comps.sort(key=lambda t: (-t[2], t[1][0, 0], t[1][0, 1]))
    obstacle = np.isin(labels, list(border))
    best = None
    for k, pix, diam2 in comps:
        d2 = _gap_distance2(pix, obstacle, metric)
        ratio2 = Fraction(d2, diam2)
        if best is None or ratio2 < best[0]:
            best = (ratio2, d2, diam2)
        obstacle |= labels == k
    ratio2, d2, diam2 = best
    value = math.sqrt(ratio2)
    d, diam = math.sqrt(d2), math.sqrt(diam2)
    error = (d + 1.5) / max(diam - 1.5, 1.0) - value if d2 else 1.5 / diam
    return ThicknessEstimate(value, abs(error), ratio2, len(comps), resolution, metric)
