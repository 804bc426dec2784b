"""Minimum sample sizes for ε-coverage of curves and surfaces.

All logarithms are natural.  Curve bounds come from a pair-coverage union
bound over ``n`` cells each hit with probability at least ``alpha``;
surface bounds come from requiring four cones per covering cell to be hit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError


class Formula(str, enum.Enum):
    GENERIC_PAIR = "generic-pair"
    CURVE = "curve"
    SURFACE = "surface"


@dataclass(frozen=True)
class BoundResult:
    m_min: int
    raw_value: float
    formula: Formula

    def to_dict(self) -> dict:
        return {"m_min": self.m_min, "raw_value": self.raw_value, "formula": self.formula.value}


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise DomainError(f"confidence p must lie in (0, 1), got {p}")


def _strict_ceiling(x: float) -> int:
    """Smallest integer strictly greater than x."""
    return math.floor(x) + 1


def pair_bound_value(alpha: float, n: float, p: float, printed: bool = False) -> float:
    """Real-valued threshold ½(1 + √(1 + 8b)) for the pair-coverage bound.

    ``b = (log(1-p) - log n) / log(1 - alpha²)``.  With ``printed=True`` the
    numerator is ``8 log(1-p) - log n`` instead of ``8 (log(1-p) - log n)``,
    reproducing the alternative grouping of the displayed formula.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    _check_p(p)
    if not n >= 1:
        raise DomainError(f"number of cells n must be >= 1, got {n}")
    if alpha == 1.0:
        # log(1 - alpha²) = -inf: every draw lands in every cell
        return 1.0
    if printed:
        num = 8.0 * math.log1p(-p) - math.log(n)
    else:
        num = 8.0 * (math.log1p(-p) - math.log(n))
    return 0.5 * (1.0 + math.sqrt(1.0 + num / math.log1p(-alpha * alpha)))


def generic_pair_bound(alpha: float, n: float, p: float, printed: bool = False) -> BoundResult:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    raw = pair_bound_value(alpha, n, p, printed)
    return BoundResult(_strict_ceiling(raw), raw, Formula.GENERIC_PAIR)


def oracle_min_m(alpha: float, n: float, p: float) -> int:
    """Smallest m >= 2 with 1 - n (1 - alpha²)^C(m,2) >= p, by direct search."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    _check_p(p)
    if not n >= 1:
        raise DomainError(f"number of cells n must be >= 1, got {n}")
    log_q = math.log1p(-alpha * alpha)
    target = math.log1p(-p) - math.log(n)
    m = 2
    while (m * (m - 1) // 2) * log_q > target:
        m += 1
    return m


def curve_cells(l: float, epsilon: float) -> float:
    return max(1.0, l / (2.0 * epsilon))


def curve_bound(l: float, epsilon: float, p: float, printed: bool = False) -> BoundResult:
    """Points needed so every curve point is bracketed within ``epsilon``.

    Instantiates the pair bound with ``alpha = epsilon / l`` and
    ``n = max(1, l / (2 epsilon))``.
    """
    if not (l > 0 and epsilon > 0):
        raise DomainError("length and epsilon must be positive")
    if l < epsilon:
        raise DomainError(f"curve length {l} is shorter than epsilon {epsilon}")
    raw = pair_bound_value(epsilon / l, curve_cells(l, epsilon), p, printed)
    return BoundResult(_strict_ceiling(raw), raw, Formula.CURVE)


def curve_radicand(l: float, epsilon: float, p: float, printed: bool = False) -> float:
    """The quantity under the square root of the curve bound."""
    _check_p(p)
    alpha2 = (epsilon / l) ** 2
    if alpha2 >= 1.0:
        return 1.0
    n = curve_cells(l, epsilon)
    if printed:
        num = 8.0 * math.log1p(-p) - math.log(l) + math.log(2.0 * epsilon)
    else:
        num = 8.0 * (math.log1p(-p) - math.log(n))
    return 1.0 + num / math.log1p(-alpha2)


def radicand_positive(l: float, epsilon: float, p: float, printed: bool = False) -> bool:
    return curve_radicand(l, epsilon, p, printed) >= 0.0


def surface_bound_value(s: float, epsilon: float, theta: float, p: float) -> float:
    _check_p(p)
    if not (s > 0 and epsilon > 0 and theta > 0):
        raise DomainError("area, epsilon and theta must be positive")
    cover = math.pi * epsilon * epsilon / (12.0 * s)
    if cover > 1.0:
        raise DomainError(f"pi eps^2 / (12 s) = {cover} exceeds 1: epsilon too large for area")
    hit = theta * epsilon * epsilon / (2.0 * s)
    if not 0.0 < hit < 1.0:
        raise DomainError(f"theta eps^2 / (2 s) = {hit} is outside (0, 1)")
    miss = -math.expm1(cover * math.log(p)) / 4.0
    if not 0.0 < miss < 1.0:
        raise DomainError(f"(1 - p^(pi eps^2/12s)) / 4 = {miss} is outside (0, 1)")
    return math.log(miss) / math.log1p(-hit)


def surface_bound(s: float, epsilon: float, theta: float | None = None, p: float = 0.1) -> BoundResult:
    """Points needed so every surface point sees all four principal cones hit.

    ``theta`` defaults to ``epsilon / 10``.
    """
    if theta is None:
        theta = epsilon / 10.0
    raw = surface_bound_value(s, epsilon, theta, p)
    return BoundResult(max(1, math.ceil(raw)), raw, Formula.SURFACE)
