"""Point primitives: distances, three-point circumradius, betweenness, neighbor queries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegeneratePair, DegenerateTriple, DimensionError
from .spatial import GridIndex, bounding_box

TOL_DISTINCT = 1e-12
HERON_TOL = 1e-14
INDEX_THRESHOLD = 512


def as_point(x) -> np.ndarray:
    p = np.asarray(x, dtype=np.float64).reshape(-1)
    if p.shape[0] not in (2, 3):
        raise DimensionError(f"points must have 2 or 3 coordinates, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def row_norms(d: np.ndarray) -> np.ndarray:
    """Euclidean norms along the last axis, summed in a fixed coordinate order.

    Every distance in the package goes through here so that the same pair of
    points always yields the same bits regardless of the code path.
    """
    s = d[..., 0] * d[..., 0] + d[..., 1] * d[..., 1]
    if d.shape[-1] == 3:
        s = s + d[..., 2] * d[..., 2]
    return np.sqrt(s)


def row_dots(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    s = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
    if u.shape[-1] == 3:
        s = s + u[..., 2] * v[..., 2]
    return s


def distance(x, y) -> float:
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise DimensionError("points have different dimensions")
    return float(row_norms(x - y))


def menger_from_sides(d1, d2, d3) -> np.ndarray:
    """Inverse circumradius from side lengths; 0 for (near-)collinear triples.

    Uses Heron's formula with the sides sorted descending and Kahan's
    parenthesisation, then clamps the radicand: anything at or below
    ``1e-14 * (d1*d2*d3)**(4/3)`` counts as collinear.
    """
    s = np.sort(np.stack(np.broadcast_arrays(d1, d2, d3)).astype(np.float64), axis=0)
    c, b, a = s[0], s[1], s[2]
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    radicand = prod / 16.0
    abc = a * b * c
    flat = radicand <= HERON_TOL * np.cbrt(abc) ** 4
    with np.errstate(divide="ignore", invalid="ignore"):
        kappa = 4.0 * np.sqrt(np.where(flat, 0.0, radicand)) / abc
    return np.where(flat | (abc == 0), 0.0, kappa)


def menger_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized Menger curvature of triples given as broadcastable arrays."""
    return menger_from_sides(row_norms(a - b), row_norms(b - c), row_norms(c - a))


def _triple(a, b, c):
    a, b, c = as_point(a), as_point(b), as_point(c)
    if not a.shape == b.shape == c.shape:
        raise DimensionError("points have different dimensions")
    pts = np.stack([a, b, c])
    tol = TOL_DISTINCT * float(row_norms(pts.max(0) - pts.min(0)))
    sides = row_norms(pts - pts[[1, 2, 0]])
    if np.any(sides <= tol):
        raise DegenerateTriple("triple contains coincident points")
    return sides


def circumradius(a, b, c) -> float:
    """Radius of the circle through three points; ``math.inf`` if collinear."""
    k = float(menger_from_sides(*_triple(a, b, c)))
    return math.inf if k == 0.0 else 1.0 / k


def menger_curvature(a, b, c) -> float:
    return float(menger_from_sides(*_triple(a, b, c)))


def opposite_side_test(a, y1, y2) -> bool:
    """True iff the chords a->y1 and a->y2 make an obtuse angle at a."""
    a, y1, y2 = as_point(a), as_point(y1), as_point(y2)
    if not a.shape == y1.shape == y2.shape:
        raise DimensionError("points have different dimensions")
    pts = np.stack([a, y1, y2])
    tol = TOL_DISTINCT * float(row_norms(pts.max(0) - pts.min(0)))
    v1, v2 = y1 - a, y2 - a
    if row_norms(v1) <= tol or row_norms(v2) <= tol:
        raise DegeneratePair("y1 or y2 coincides with a")
    return bool(row_dots(v1, v2) < 0)


@dataclass(eq=False)
class PointCloud:
    """Finite indexed point set in 2- or 3-space.

    ``meta`` carries provenance such as ``{"seed": 7, "generator": "sphere-r5"}``.
    A grid index is built lazily the first time a neighbor query needs it.
    """

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] not in (2, 3):
            raise DimensionError(f"expected an (m, 2) or (m, 3) array, got shape {pts.shape}")
        if pts.shape[0] == 0:
            raise ValueError("point cloud is empty")
        if not np.isfinite(pts).all():
            raise ValueError("point cloud contains non-finite coordinates")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @cached_property
    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return bounding_box(self.points)

    @property
    def diameter(self) -> float:
        """Length of the bounding-box diagonal."""
        lo, hi = self.bbox
        return float(row_norms(hi - lo))

    @property
    def tol_distinct(self) -> float:
        return TOL_DISTINCT * self.diameter

    @cached_property
    def index(self) -> GridIndex | None:
        if len(self) <= INDEX_THRESHOLD:
            return None
        return GridIndex(self.points, self.bbox)


def neighbors_within(cloud: PointCloud, a, r: float, index: bool = True):
    """Indices and distances of cloud points with ``tol < d(x, a) < r``.

    Sorted by ascending distance, ties by index.
    """
    a = as_point(a)
    if a.shape[0] != cloud.dim:
        raise DimensionError("query point and cloud have different dimensions")
    if not r > 0:
        raise ValueError("radius must be positive")
    grid = cloud.index if index else None
    if grid is None:
        idx = np.arange(len(cloud))
        d = row_norms(cloud.points - a)
    else:
        idx = np.sort(grid.ball_candidates(a, r))
        d = row_norms(cloud.points[idx] - a)
    keep = (d < r) & (d > cloud.tol_distinct)
    idx, d = idx[keep], d[keep]
    order = np.lexsort((idx, d))
    return idx[order], d[order]


def radius_query(cloud: PointCloud, a, r: float) -> list[tuple[int, np.ndarray]]:
    idx, _ = neighbors_within(cloud, a, r)
    return [(int(i), cloud.points[i].copy()) for i in idx]
