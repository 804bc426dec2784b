"""Curvature of a plane curve at a query point from an unordered point cloud."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .bounds import curve_bound
from .errors import DimensionError, InsufficientSamples, NoBracketingPair
from .geometry import PointCloud, as_point, menger_many, neighbors_within, row_dots

_PAIR_BLOCK = 2048


@dataclass(frozen=True)
class CurveEstimate:
    kappa: float
    witnesses: tuple[int, int]
    epsilon_used: float
    m_required: int
    m_provided: int
    bound_raw: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witnesses"] = list(self.witnesses)
        return d


def _tightest_bracket(v: np.ndarray, d: np.ndarray, idx: np.ndarray):
    """Among pairs with v_i . v_j < 0, the one minimising max(d_i, d_j).

    ``d`` is ascending, so the partner set for a farther point j is every
    i < j in this ordering (plus equal-distance points after it).  Ties are
    broken by the lexicographically smallest (min index, max index).
    """
    best = None
    n = len(d)
    for s in range(0, n, _PAIR_BLOCK):
        rows = slice(s, min(n, s + _PAIR_BLOCK))
        g = v[rows] @ v.T
        i, j = np.nonzero(g < 0)
        if i.size == 0:
            continue
        i = i + s
        reach = np.maximum(d[i], d[j])
        lo, hi = np.minimum(idx[i], idx[j]), np.maximum(idx[i], idx[j])
        k = np.lexsort((hi, lo, reach))[0]
        cand = (reach[k], lo[k], hi[k])
        if best is None or cand < best:
            best = cand
        if s + _PAIR_BLOCK < n and d[min(n, s + _PAIR_BLOCK)] > best[0]:
            break
    return best


def estimate_curve_curvature_unchecked(cloud: PointCloud, a, epsilon: float) -> CurveEstimate:
    """Inverse circumradius of the tightest pair bracketing ``a`` within ``epsilon``."""
    a = as_point(a)
    if cloud.dim != 2 or a.shape[0] != 2:
        raise DimensionError("curve estimation needs a 2-D cloud and query point")
    idx, d = neighbors_within(cloud, a, epsilon)
    if idx.size < 2:
        raise NoBracketingPair(f"fewer than two cloud points within {epsilon} of {a.tolist()}")
    v = cloud.points[idx] - a
    best = _tightest_bracket(v, d, idx)
    if best is None:
        raise NoBracketingPair(f"no pair of cloud points brackets {a.tolist()} within {epsilon}")
    _, i1, i2 = best
    kappa = float(menger_many(cloud.points[i1], a, cloud.points[i2]))
    return CurveEstimate(kappa, (int(i1), int(i2)), float(epsilon), 0, len(cloud))


def estimate_curve_curvature(cloud: PointCloud, a, epsilon: float, p: float, l: float) -> CurveEstimate:
    """Curvature at ``a`` with the sample-size gate for a curve of length ``l``.

    The working radius is ``min(l, epsilon)``; the cloud must hold strictly
    more points than the coverage bound at that radius.

    Raises
    ------
    InsufficientSamples
        The cloud is too small for confidence ``p``.
    NoBracketingPair
        No two cloud points bracket ``a`` within the working radius.
    """
    if not l > 0:
        raise ValueError("curve length must be positive")
    eps1 = min(l, epsilon)
    bound = curve_bound(l, eps1, p)
    if not len(cloud) > bound.raw_value:
        raise InsufficientSamples(bound.m_min, len(cloud), bound)
    est = estimate_curve_curvature_unchecked(cloud, a, eps1)
    return CurveEstimate(est.kappa, est.witnesses, eps1, bound.m_min, len(cloud), bound.raw_value)
