"""Uniform-grid spatial index for large point clouds.

Points are bucketed into at most 65536 cells so the cell ids fit in
``uint16`` and a stable ``argsort`` runs as a radix sort.  The index
never copies the coordinates; it stores a permutation grouping point
indices by cell, which keeps memory at ~10 bytes per point on top of
the cloud itself.
"""

from __future__ import annotations

import numpy as np

MAX_CELLS = 65536
POINTS_PER_CELL = 16
_CHUNK = 1 << 22


def bounding_box(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # per-column reductions are much faster than axis=0 on row-major data
    lo = np.array([points[:, k].min() for k in range(points.shape[1])])
    hi = np.array([points[:, k].max() for k in range(points.shape[1])])
    return lo, hi


class GridIndex:
    def __init__(self, points: np.ndarray, bbox: tuple[np.ndarray, np.ndarray] | None = None):
        n, dim = points.shape
        self.dim = dim
        self.lo, hi = bbox if bbox is not None else bounding_box(points)
        extent = hi - self.lo
        target = int(min(MAX_CELLS, max(1, n // POINTS_PER_CELL)))
        self.shape = _grid_shape(extent, target)
        self.ncells = int(np.prod(self.shape))
        live = extent > 0
        self.h = np.where(live, extent / self.shape, 1.0)
        self.half = np.where(live, 0.5 * self.h, 0.0)
        self.half_diag = float(np.sqrt((self.half**2).sum()))
        self._strides = np.array(
            [int(np.prod(self.shape[i + 1:])) for i in range(dim)], dtype=np.int64
        )

        ids = np.empty(n, dtype=np.uint16 if self.ncells <= 65536 else np.uint32)
        for s in range(0, n, _CHUNK):
            ids[s:s + _CHUNK] = self._cell_ids(points[s:s + _CHUNK])
        self.order = np.argsort(ids, kind="stable")
        counts = np.bincount(ids, minlength=self.ncells)
        del ids
        self.counts = counts
        self.start = np.concatenate([[0], np.cumsum(counts)[:-1]])
        self.nonempty = np.flatnonzero(counts)
        coords = np.stack(np.unravel_index(self.nonempty, self.shape), axis=1)
        self.centers = self.lo + (coords + 0.5) * self.h

    def _cell_ids(self, pts: np.ndarray) -> np.ndarray:
        c = np.floor((pts - self.lo) / self.h).astype(np.int64)
        np.clip(c, 0, np.asarray(self.shape) - 1, out=c)
        return c @ self._strides

    def cells_in_box(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        shape = np.asarray(self.shape)
        i0 = np.clip(np.floor((lo - self.lo) / self.h).astype(np.int64), 0, shape - 1)
        i1 = np.clip(np.floor((hi - self.lo) / self.h).astype(np.int64), 0, shape - 1)
        axes = [np.arange(i0[k], i1[k] + 1) for k in range(self.dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        return sum(g.ravel() * s for g, s in zip(grids, self._strides))

    def gather(self, cells: np.ndarray) -> np.ndarray:
        """Point indices stored in ``cells``, grouped by cell."""
        cells = np.asarray(cells, dtype=np.int64)
        counts = self.counts[cells]
        total = int(counts.sum())
        if total == 0:
            return np.empty(0, dtype=np.int64)
        offsets = np.repeat(self.start[cells] - np.cumsum(counts) + counts, counts)
        return self.order[offsets + np.arange(total)]

    def ball_candidates(self, a: np.ndarray, r: float) -> np.ndarray:
        """Indices of all points in cells touching the box around ``a``."""
        cells = self.cells_in_box(a - r, a + r)
        if cells.size > self.ncells // 2:
            return np.arange(len(self.order))
        return self.gather(cells)


def _grid_shape(extent: np.ndarray, target: int) -> tuple:
    live = extent > 0
    k = int(live.sum())
    if k == 0 or target <= 1:
        return tuple(1 for _ in extent)
    h = (np.prod(extent[live]) / target) ** (1.0 / k)
    while True:
        shape = np.where(live, np.maximum(1, np.ceil(extent / h)), 1).astype(np.int64)
        if np.prod(shape) <= target:
            return tuple(int(s) for s in shape)
        h *= 1.02
