"""Principal, Gaussian and mean curvature of a surface from a 3-D point cloud.

For a query point ``a`` the first principal curvature comes from the
straightest chord through ``a``: every neighbour ``y`` within ``epsilon`` is
paired with its conjugates, the cloud points ``c`` minimising the straightness
deficit ``d(y,a) + d(c,a) - d(y,c)``, and the smallest Menger curvature over
those triples wins.  The second principal curvature repeats the conjugate
search for the cloud points whose chord from ``a`` is most nearly parallel to
the normal of the first triple's plane.

Conjugate and score searches range over the whole cloud.  On large clouds
they are answered exactly with a local/far split: points within
``2 * epsilon`` are searched through per-shell direction trees, and far grid
cells are discarded only when a geometric lower bound proves they cannot
beat the best local candidate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .bounds import surface_bound
from .errors import (
    DegenerateNormal,
    DimensionError,
    EmptyConjugateSet,
    EmptyNeighborhood,
    EmptyScoreSet,
    InsufficientSamples,
)
from .geometry import PointCloud, as_point, menger_many, row_dots, row_norms
from .spatial import GridIndex

LOCAL_RADIUS_FACTOR = 2.0
BRUTE_PAIRS = 4_000_000
TOL_SCORE = 1e-9
_SHELLS = 12
_ANGLE_PAD = 1e-9
_FAR_BLOCK = 1 << 20


def conjugate_tolerance(epsilon: float) -> float:
    return 1e-9 + 1e-6 * epsilon


@dataclass(frozen=True)
class SurfaceEstimate:
    kappa1: float
    kappa2: float
    gaussian: float
    mean: float
    witnesses1: tuple[int, int]
    witnesses2: tuple[int, int]
    epsilon_used: float
    theta_used: float
    m_required: int
    m_provided: int
    bound_raw: float | None = None
    normal_fallback: bool = False

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["witnesses1"] = list(self.witnesses1)
        d["witnesses2"] = list(self.witnesses2)
        return d


@dataclass
class _Pairs:
    """Flat (query row, cloud index, deficit) triples."""

    row: np.ndarray
    col: np.ndarray
    f: np.ndarray

    @classmethod
    def empty(cls):
        return cls(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0))

    @classmethod
    def concat(cls, parts):
        parts = [p for p in parts if p.row.size]
        if not parts:
            return cls.empty()
        return cls(*(np.concatenate([getattr(p, k) for p in parts]) for k in ("row", "col", "f")))


def _flatten(lists) -> tuple[np.ndarray, np.ndarray]:
    lens = np.fromiter((len(x) for x in lists), np.int64, len(lists))
    flat = np.fromiter(itertools.chain.from_iterable(lists), np.int64, int(lens.sum()))
    return np.repeat(np.arange(len(lists)), lens), flat


class SurfaceQuery:
    """Search context around one query point; shared by both curvature steps.

    ``grid`` defaults to the cloud's own index (``None`` for small clouds,
    in which case every point is treated as local and searched exhaustively).
    """

    def __init__(self, cloud: PointCloud, a, epsilon: float, *, grid: GridIndex | None = "auto",
                 local_radius: float | None = None, brute_pairs: int = BRUTE_PAIRS):
        a = as_point(a)
        if cloud.dim != 3 or a.shape[0] != 3:
            raise DimensionError("surface estimation needs a 3-D cloud and query point")
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        self.cloud, self.a, self.eps = cloud, a, float(epsilon)
        self.tol = cloud.tol_distinct
        self.tol_conj = conjugate_tolerance(self.eps)
        self.brute_pairs = brute_pairs
        self.grid = cloud.index if grid == "auto" else grid
        if self.grid is None:
            self.R = math.inf
            idx = np.arange(len(cloud))
            r = row_norms(cloud.points - a)
            keep = r > self.tol
            self.L_idx, self.L_r = idx[keep], r[keep]
        else:
            # the local set must contain the epsilon-neighbourhood
            self.R = max(float(local_radius or LOCAL_RADIUS_FACTOR * self.eps), self.eps)
            self.L_idx, self.L_r = self._local()
        self.L_pts = cloud.points[self.L_idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            self.L_u = (self.L_pts - a) / self.L_r[:, None]
        self.D = np.flatnonzero(self.L_r < self.eps)
        self.normal, self.normal_ok = self._pca_normal()
        self._shells = None

    def _local(self):
        cand = np.sort(self.grid.ball_candidates(self.a, self.R))
        r = row_norms(self.cloud.points[cand] - self.a)
        keep = (r < self.R) & (r > self.tol)
        return cand[keep], r[keep]

    def _pca_normal(self):
        pts = self.L_pts[self.D] if self.D.size >= 3 else self.L_pts[:64]
        if len(pts) < 2:
            return np.array([0.0, 0.0, 1.0]), False
        centred = np.vstack([pts, self.a]) - np.vstack([pts, self.a]).mean(0)
        w, v = np.linalg.eigh(centred.T @ centred)
        ok = w[1] > 1e-12 * max(w[2], 1e-300)
        return v[:, 0], bool(ok)

    # -- conjugate search ------------------------------------------------------

    def conjugates(self, y_pts: np.ndarray) -> _Pairs:
        """Conjugate sets of every row of ``y_pts``: cloud points within
        ``tol_conj`` of the minimum straightness deficit."""
        y_pts = np.atleast_2d(y_pts)
        d1 = row_norms(y_pts - self.a)
        if len(y_pts) * len(self.L_idx) <= self.brute_pairs or self.grid is None:
            local = self._conj_brute(y_pts, d1, np.arange(len(self.L_idx)))
        else:
            local = self._conj_shells(y_pts, d1)
        fmin = self._row_min(local, len(y_pts))
        if self.grid is not None and math.isfinite(self.R):
            margin = 1e-12 * (1.0 + d1 + self.R)
            far = self._conj_far(y_pts, d1, fmin + self.tol_conj + margin)
            local = _Pairs.concat([local, far])
            fmin = self._row_min(local, len(y_pts))
        band = local.f <= fmin[local.row] + self.tol_conj
        return _Pairs(local.row[band], local.col[band], local.f[band])

    @staticmethod
    def _row_min(pairs: _Pairs, n: int) -> np.ndarray:
        fmin = np.full(n, np.inf)
        np.minimum.at(fmin, pairs.row, pairs.f)
        return fmin

    def _deficits(self, y_pts, d1, rows, cols_local=None, cols=None, r=None):
        """f = d(y,a) + d(c,a) - d(y,c) with self-pairs (d(y,c) <= tol) dropped."""
        if cols_local is not None:
            cols, cpts, r = self.L_idx[cols_local], self.L_pts[cols_local], self.L_r[cols_local]
        else:
            cpts = self.cloud.points[cols]
        dyc = row_norms(y_pts[rows] - cpts)
        f = (d1[rows] + r) - dyc
        keep = dyc > self.tol
        return _Pairs(rows[keep], cols[keep], f[keep])

    def _conj_brute(self, y_pts, d1, local_cols) -> _Pairs:
        out = []
        n = len(local_cols)
        if n == 0:
            return _Pairs.empty()
        step = max(1, self.brute_pairs // max(n, 1) // 4)
        for s in range(0, len(y_pts), step):
            rows = np.arange(s, min(len(y_pts), s + step))
            rr = np.repeat(rows, n)
            cc = np.tile(local_cols, len(rows))
            p = self._deficits(y_pts, d1, rr, cols_local=cc)
            fmin = self._row_min(p, len(y_pts))
            # keep a generous superset; the final band is taken after merging
            keep = p.f <= fmin[p.row] + self.tol_conj
            out.append(_Pairs(p.row[keep], p.col[keep], p.f[keep]))
        return _Pairs.concat(out)

    def _shell_trees(self):
        if self._shells is None:
            R = min(self.R, float(self.L_r.max()) * (1 + 1e-12)) if self.L_r.size else self.R
            edges = np.concatenate([[0.0], R * 2.0 ** (-(np.arange(_SHELLS, 0, -1) - 1) / 2.0)])
            which = np.searchsorted(edges, self.L_r, side="right") - 1
            shells = []
            for j in range(len(edges)):
                members = np.flatnonzero(which == j)
                if members.size:
                    tree = cKDTree(self.L_u[members]) if j > 0 else None
                    shells.append((edges[j], members, tree))
            self._shells = shells
        return self._shells

    def _conj_shells(self, y_pts, d1) -> _Pairs:
        w = (self.a - y_pts) / d1[:, None]
        shells = self._shell_trees()
        ny = len(y_pts)
        rows_all = np.arange(ny)
        seeds = np.full(ny, np.inf)
        parts = []
        for lo, members, tree in shells:
            if tree is None:
                p = self._conj_brute(y_pts, d1, members)
                parts.append(p)
                np.minimum.at(seeds, p.row, p.f)
                continue
            _, k = tree.query(w, k=min(2, len(members)))
            k = k.reshape(ny, -1)
            for col in range(k.shape[1]):
                p = self._deficits(y_pts, d1, rows_all, cols_local=members[k[:, col]])
                np.minimum.at(seeds, p.row, p.f)
        thresh = seeds + self.tol_conj + 1e-12 * (1.0 + d1 + self.R)
        for lo, members, tree in shells:
            if tree is None:
                continue
            omega = lo * d1 / (lo + d1)
            with np.errstate(divide="ignore", invalid="ignore"):
                rad = np.sqrt(2.0 * thresh / omega) * (1 + 1e-9) + 1e-12
            rad = np.where(np.isfinite(rad), np.minimum(rad, 2.5), 2.5)
            rows, hits = _flatten(tree.query_ball_point(w, rad))
            if rows.size:
                parts.append(self._deficits(y_pts, d1, rows, cols_local=members[hits]))
        return _Pairs.concat(parts)

    def _conj_far(self, y_pts, d1, thresh) -> _Pairs:
        finite = np.isfinite(thresh)
        tau1 = float(np.max(thresh / d1)) if finite.all() else math.inf
        tau2 = float(np.max(thresh)) if finite.all() else math.inf

        def allowed(r):
            c = 1.0 - tau1 - tau2 / np.asarray(r)
            return np.arccos(np.clip(c, -1.0, 1.0)) + _ANGLE_PAD

        w = (self.a - y_pts) / d1[:, None]
        idx, pts, r, u = self._far_points(w, allowed)
        if idx.size == 0:
            return _Pairs.empty()
        if not math.isfinite(tau1):
            rows = np.repeat(np.arange(len(y_pts)), idx.size)
            cols = np.tile(np.arange(idx.size), len(y_pts))
            return self._deficits(y_pts, d1, rows, cols=idx[cols], r=r[cols])
        rad = np.sqrt(2.0 * (tau1 + tau2 / r)) * (1 + 1e-9) + 1e-12
        wtree = cKDTree(w)
        out = []
        # pairs above a row's threshold can never enter its band; dropping them
        # per block keeps the ball-query lists small on flat regions
        for s in range(0, idx.size, _FAR_BLOCK // 16):
            sl = slice(s, s + _FAR_BLOCK // 16)
            cols, rows = _flatten(wtree.query_ball_point(u[sl], np.minimum(rad[sl], 2.5)))
            cols += s
            p = self._deficits(y_pts, d1, rows, cols=idx[cols], r=r[cols])
            keep = p.f <= thresh[p.row]
            out.append(_Pairs(p.row[keep], p.col[keep], p.f[keep]))
        return _Pairs.concat(out)

    def _far_points(self, w, allowed):
        """Cloud points with r >= R whose direction from ``a`` may lie within
        ``allowed(r)`` of some row of ``w``."""
        grid = self.grid
        o = grid.centers - self.a
        do = row_norms(o)
        hc = grid.half_diag
        cand = do + hc >= self.R
        outside = do > hc
        wtree = cKDTree(w)
        chord = np.full(len(do), 0.0)
        sel = cand & outside
        if sel.any():
            chord[sel], _ = wtree.query(o[sel] / do[sel, None])
        gamma = 2.0 * np.arcsin(np.minimum(1.0, chord / 2.0))
        with np.errstate(invalid="ignore", divide="ignore"):
            beta = np.arcsin(np.minimum(1.0, hc / do))
        rmin = np.maximum(self.R, do - hc)
        prune = outside & (gamma - beta > allowed(rmin))
        cells = grid.nonempty[cand & ~prune]
        idx = np.sort(grid.gather(cells))
        if idx.size == 0:
            return idx, np.empty((0, 3)), np.empty(0), np.empty((0, 3))
        el_w = np.arcsin(np.clip(w @ self.normal, -1.0, 1.0))
        out = []
        # blocks bound the temporaries when a cone covers much of the cloud
        for s in range(0, idx.size, _FAR_BLOCK):
            bi = idx[s:s + _FAR_BLOCK]
            pts = self.cloud.points[bi]
            r = row_norms(pts - self.a)
            keep = (r >= self.R) & (r > self.tol)
            bi, pts, r = bi[keep], pts[keep], r[keep]
            u = (pts - self.a) / r[:, None]
            el = np.arcsin(np.clip(u @ self.normal, -1.0, 1.0))
            gap = np.maximum(0.0, np.maximum(el_w.min() - el, el - el_w.max()))
            keep = gap <= allowed(r)
            out.append((bi[keep], pts[keep], r[keep], u[keep]))
        return tuple(np.concatenate(parts) for parts in zip(*out))

    # -- score search ----------------------------------------------------------

    def best_scored(self, normal: np.ndarray, scope: str = "full"):
        """Cloud indices whose chord from ``a`` is within TOL_SCORE of the
        maximal |cos| with ``normal``."""
        nn = float(row_norms(normal))
        if scope == "local":
            members = self.D
        else:
            members = np.arange(len(self.L_idx))
        idx = self.L_idx[members]
        s = np.abs(row_dots(self.L_pts[members] - self.a, normal)) / (self.L_r[members] * nn)
        if scope == "full" and self.grid is not None and math.isfinite(self.R):
            s_loc = float(s.max()) if s.size else 0.0
            ang = math.acos(min(1.0, max(-1.0, s_loc - TOL_SCORE))) + _ANGLE_PAD
            nhat = normal / nn
            fidx, fpts, fr, _ = self._far_points(np.stack([nhat, -nhat]), lambda r: np.full(np.shape(r), ang))
            fs = np.abs(row_dots(fpts - self.a, normal)) / (fr * nn)
            idx, s = np.concatenate([idx, fidx]), np.concatenate([s, fs])
        if s.size == 0:
            return idx
        return idx[s >= s.max() - TOL_SCORE]


def _lexmin(kappa, *keys):
    order = np.lexsort(tuple(reversed(keys)) + (kappa,))
    return order[0]


def conjugate_set(cloud: PointCloud, a, y, *, epsilon: float | None = None) -> list[tuple[int, float]]:
    """C-conjugates of ``y`` about ``a`` with their straightness deficits.

    The membership band is ``1e-9 + 1e-6 * epsilon`` above the minimum deficit;
    when ``epsilon`` is omitted ``d(y, a)`` stands in for it.
    """
    a, y = as_point(a), as_point(y)
    d = float(row_norms(y - a))
    if d <= cloud.tol_distinct:
        raise ValueError("y coincides with a")
    q = SurfaceQuery(cloud, a, epsilon if epsilon is not None else d)
    pairs = q.conjugates(y[None, :])
    if pairs.col.size == 0:
        raise EmptyConjugateSet("no admissible conjugate candidates")
    order = np.argsort(pairs.col, kind="stable")
    return [(int(c), float(f)) for c, f in zip(pairs.col[order], pairs.f[order])]


def _first_principal(q: SurfaceQuery):
    if q.D.size == 0:
        raise EmptyNeighborhood(f"no cloud points within {q.eps} of {q.a.tolist()}")
    y_pts = q.L_pts[q.D]
    pairs = q.conjugates(y_pts)
    if pairs.row.size == 0:
        raise EmptyConjugateSet("no neighbour has an admissible conjugate")
    kappa = menger_many(y_pts[pairs.row], q.a, q.cloud.points[pairs.col])
    y_idx = q.L_idx[q.D][pairs.row]
    k = _lexmin(kappa, y_idx, pairs.col)
    return float(kappa[k]), int(y_idx[k]), int(pairs.col[k])


def _second_principal(q: SurfaceQuery, q_pt, qp_pt, scope: str = "full"):
    """Returns (kappa2, b index, b' index, used_fallback)."""
    normal = np.cross(q_pt - q.a, qp_pt - q.a)
    scale = float(row_norms(q_pt - q.a) * row_norms(qp_pt - q.a))
    fallback = (float(row_norms(normal)) <= 1e-12 * scale
                or float(menger_many(q_pt, q.a, qp_pt)) == 0.0)
    if fallback:
        if not q.normal_ok:
            raise DegenerateNormal("chord triple is collinear and the neighbourhood has no normal")
        normal = np.cross(q_pt - q.a, q.normal)
        if float(row_norms(normal)) <= 1e-12 * float(row_norms(q_pt - q.a)):
            raise DegenerateNormal("fallback normal is parallel to the chord")
    best = q.best_scored(normal, scope)
    if best.size == 0:
        raise EmptyScoreSet("no cloud point other than a to score")
    b_pts = q.cloud.points[best]
    pairs = q.conjugates(b_pts)
    if pairs.row.size == 0:
        raise EmptyConjugateSet("no scored point has an admissible conjugate")
    kappa = menger_many(b_pts[pairs.row], q.a, q.cloud.points[pairs.col])
    b_idx = best[pairs.row]
    k = _lexmin(kappa, b_idx, pairs.col)
    return float(kappa[k]), int(b_idx[k]), int(pairs.col[k]), fallback


def principal_curvature_1(cloud: PointCloud, a, epsilon: float) -> tuple[float, int, int]:
    """Smallest straightest-chord curvature over neighbours within ``epsilon``.

    Returns ``(kappa1, q_index, q_prime_index)``; ties go to the lowest
    ``(q_index, q_prime_index)``.
    """
    return _first_principal(SurfaceQuery(cloud, a, epsilon))


def principal_curvature_2(cloud: PointCloud, a, q, q_prime, *, epsilon: float,
                          scope: str = "full") -> tuple[float, int, int]:
    """Curvature along the chord most nearly normal to the plane of (q, a, q′)."""
    sq = SurfaceQuery(cloud, a, epsilon)
    k, b, bp, _ = _second_principal(sq, as_point(q), as_point(q_prime), scope)
    return k, b, bp


def estimate_surface_curvature(cloud: PointCloud, a, epsilon: float, p: float, s: float,
                               theta: float | None = None, *, scope: str = "full",
                               query: SurfaceQuery | None = None) -> SurfaceEstimate:
    """Principal, Gaussian and mean curvature at ``a`` with the sample-size gate.

    ``s`` is the surface area; ``theta`` (default ``epsilon / 10``) only
    enters the bound.  Curvatures are unsigned.
    """
    if scope not in ("full", "local"):
        raise ValueError("scope must be 'full' or 'local'")
    theta = epsilon / 10.0 if theta is None else theta
    bound = surface_bound(s, epsilon, theta, p)
    if not len(cloud) > bound.raw_value:
        raise InsufficientSamples(math.floor(bound.raw_value) + 1, len(cloud), bound)
    q = query or SurfaceQuery(cloud, a, epsilon)
    k1, qi, qpi = _first_principal(q)
    pts = cloud.points
    k2, bi, bpi, fallback = _second_principal(q, pts[qi], pts[qpi], scope)
    return SurfaceEstimate(
        kappa1=k1, kappa2=k2, gaussian=k1 * k2, mean=(k1 + k2) / 2.0,
        witnesses1=(qi, qpi), witnesses2=(bi, bpi),
        epsilon_used=float(epsilon), theta_used=float(theta),
        m_required=bound.m_min, m_provided=len(cloud), bound_raw=bound.raw_value,
        normal_fallback=fallback,
    )
