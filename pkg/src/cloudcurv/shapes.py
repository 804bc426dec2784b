"""Synthetic curves and surfaces with exact samplers and curvature oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NonSmoothPointError, OffShapeError, QuadratureError
from .geometry import PointCloud, as_point

TOL_ON_SHAPE = 1e-9
_CHUNK = 1 << 21
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


@dataclass(frozen=True)
class Circle:
    center: tuple
    radius: float
    name: str = ""
    description: str = ""
    probe: tuple | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True, eq=False)
class GraphCurve:
    """The graph y = f(x) over [x0, x1]; derivatives are supplied in closed form."""

    f: Callable
    df: Callable
    d2f: Callable
    x0: float
    x1: float
    name: str = ""
    description: str = ""
    probe: tuple | None = None
    knots: int = 4096

    def __post_init__(self):
        if not self.x0 < self.x1:
            raise ValueError("graph domain needs x0 < x1")

    def speed(self, x):
        return np.sqrt(1.0 + self.df(x) ** 2)

    @cached_property
    def arclength_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Knots x_k and cumulative arc length s_k, refined once if too coarse."""
        for knots in (self.knots, 65536):
            x = np.linspace(self.x0, self.x1, knots + 1)
            s = np.concatenate([[0.0], np.cumsum(_gl_segments(self.speed, x))])
            inv = PchipInterpolator(s, x)
            xm = 0.5 * (x[:-1] + x[1:])
            sm = s[:-1] + _gl_segments(self.speed, np.stack([x[:-1], xm], 1).ravel())[::2]
            err = np.abs(inv(sm) - xm) * self.speed(xm)
            if err.max() <= 1e-9 * s[-1]:
                break
        return x, s

    @cached_property
    def _inverse(self) -> PchipInterpolator:
        x, s = self.arclength_table
        return PchipInterpolator(s, x)

    def x_at_arclength(self, s):
        return np.clip(self._inverse(s), self.x0, self.x1)


def _gl_segments(g: Callable, x: np.ndarray) -> np.ndarray:
    """10-point Gauss-Legendre integral of g over each [x_k, x_k+1]."""
    a, b = x[:-1], x[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    vals = g(mid[:, None] + half[:, None] * _GL_X[None, :])
    return half * (vals @ _GL_W)


@dataclass(frozen=True)
class Sphere:
    center: tuple
    radius: float
    name: str = ""
    description: str = ""
    probe: tuple | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True, eq=False)
class GraphSurface:
    """The graph z = f(x, y) over a rectangle, with closed-form partials.

    ``grad`` returns (f_x, f_y) and ``hess`` returns (f_xx, f_xy, f_yy).
    ``singular`` lists (x, y) points where the surface is not smooth.
    """

    f: Callable
    grad: Callable
    hess: Callable
    domain: tuple
    name: str = ""
    description: str = ""
    probe: tuple | None = None
    singular: tuple = ()

    def __post_init__(self):
        x0, x1, y0, y1 = self.domain
        if not (x0 < x1 and y0 < y1):
            raise ValueError("graph domain must be a non-empty rectangle")

    def area_element(self, x, y):
        fx, fy = self.grad(x, y)
        return np.sqrt(1.0 + fx * fx + fy * fy)

    @cached_property
    def max_area_element(self) -> float:
        x0, x1, y0, y1 = self.domain
        gx, gy = np.meshgrid(np.linspace(x0, x1, 257), np.linspace(y0, y1, 257))
        w = self.area_element(gx, gy)
        k = np.nanargmax(w)
        best = float(w.flat[k])
        res = optimize.minimize(
            lambda v: -float(self.area_element(v[0], v[1])),
            x0=[gx.flat[k], gy.flat[k]],
            bounds=[(x0, x1), (y0, y1)],
            method="L-BFGS-B",
        )
        if res.success and np.isfinite(res.fun):
            best = max(best, -float(res.fun))
        if not np.isfinite(best) or best < 1.0:
            raise DomainError(f"could not bound the area element of {self.name or 'graph'}")
        return best * (1.0 + 1e-9)


CurveSpec = Circle | GraphCurve
SurfaceSpec = Sphere | GraphSurface


# --- measures -----------------------------------------------------------------

def curve_length(spec: CurveSpec) -> float:
    if isinstance(spec, Circle):
        return 2.0 * math.pi * spec.radius
    val, err, info = integrate.quad(
        spec.speed, spec.x0, spec.x1, epsabs=0.0, epsrel=1e-12, limit=500, full_output=True
    )[:3]
    if err > 1e-9 * val:
        raise QuadratureError(f"arc length of {spec.name or 'curve'} did not converge (err {err:g})")
    return float(val)


def surface_area(spec: SurfaceSpec) -> float:
    if isinstance(spec, Sphere):
        return 4.0 * math.pi * spec.radius**2
    x0, x1, y0, y1 = spec.domain
    val, err = integrate.dblquad(
        lambda y, x: float(spec.area_element(x, y)), x0, x1, y0, y1, epsabs=0.0, epsrel=1e-10
    )
    if not np.isfinite(val) or err > 1e-7 * val:
        raise QuadratureError(f"area of {spec.name or 'surface'} did not converge (err {err:g})")
    return float(val)


# --- samplers -----------------------------------------------------------------

def _meta(spec, seed, m) -> dict:
    return {"seed": int(seed), "generator": spec.name or type(spec).__name__, "m": int(m)}


def sample_curve_uniform(spec: CurveSpec, m: int, seed: int) -> PointCloud:
    """m i.i.d. points uniform with respect to arc length."""
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(spec, Circle):
        t = rng.uniform(0.0, 2.0 * math.pi, m)
        pts = np.column_stack([np.cos(t), np.sin(t)]) * spec.radius + np.asarray(spec.center)
    else:
        _, s = spec.arclength_table
        x = spec.x_at_arclength(rng.uniform(0.0, s[-1], m))
        pts = np.column_stack([x, spec.f(x)])
    return PointCloud(pts, _meta(spec, seed, m))


def sample_surface_uniform(spec: SurfaceSpec, m: int, seed: int) -> PointCloud:
    """m i.i.d. points uniform with respect to surface area.

    Spheres normalise isotropic Gaussian vectors; graphs use rejection
    sampling over the domain rectangle with acceptance weight
    ``sqrt(1 + f_x² + f_y²) / W_max``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    rng = np.random.default_rng(seed)
    out = np.empty((m, 3))
    if isinstance(spec, Sphere):
        for s in range(0, m, _CHUNK):
            block = out[s:s + _CHUNK]
            block[:] = rng.standard_normal(block.shape)
            block /= np.sqrt((block * block).sum(axis=1))[:, None]
            block *= spec.radius
            block += np.asarray(spec.center)
    else:
        x0, x1, y0, y1 = spec.domain
        wmax = spec.max_area_element
        filled = 0
        while filled < m:
            k = min(_CHUNK, max(1024, int(1.2 * (m - filled) * wmax)))
            x = rng.uniform(x0, x1, k)
            y = rng.uniform(y0, y1, k)
            u = rng.uniform(0.0, 1.0, k)
            w = spec.area_element(x, y)
            if np.any(w > wmax):
                raise DomainError(f"area element exceeds its estimated maximum on {spec.name}")
            keep = u * wmax < w
            x, y = x[keep][: m - filled], y[keep][: m - filled]
            n = len(x)
            out[filled:filled + n, 0] = x
            out[filled:filled + n, 1] = y
            out[filled:filled + n, 2] = spec.f(x, y)
            filled += n
    return PointCloud(out, _meta(spec, seed, m))


# --- oracles ------------------------------------------------------------------

def _check_curve_point(spec: CurveSpec, a: np.ndarray) -> None:
    if isinstance(spec, Circle):
        r = math.hypot(*(a - np.asarray(spec.center)))
        ok = abs(r - spec.radius) <= TOL_ON_SHAPE * max(1.0, spec.radius)
    else:
        x, y = a
        inside = spec.x0 - TOL_ON_SHAPE <= x <= spec.x1 + TOL_ON_SHAPE
        ok = inside and abs(y - float(spec.f(x))) <= TOL_ON_SHAPE * max(1.0, abs(y))
    if not ok:
        raise OffShapeError(f"{tuple(a)} is not on {spec.name or 'the curve'}")


def curve_curvature_oracle(spec: CurveSpec, a) -> float:
    a = as_point(a)
    _check_curve_point(spec, a)
    if isinstance(spec, Circle):
        return 1.0 / spec.radius
    x = a[0]
    return float(abs(spec.d2f(x)) / (1.0 + spec.df(x) ** 2) ** 1.5)


def _check_surface_point(spec: SurfaceSpec, a: np.ndarray) -> None:
    if isinstance(spec, Sphere):
        r = float(np.linalg.norm(a - np.asarray(spec.center)))
        ok = abs(r - spec.radius) <= TOL_ON_SHAPE * max(1.0, spec.radius)
    else:
        x0, x1, y0, y1 = spec.domain
        x, y, z = a
        t = TOL_ON_SHAPE
        inside = x0 - t <= x <= x1 + t and y0 - t <= y <= y1 + t
        ok = inside and abs(z - float(spec.f(x, y))) <= t * max(1.0, abs(z))
    if not ok:
        raise OffShapeError(f"{tuple(a)} is not on {spec.name or 'the surface'}")


def surface_curvature_oracle(spec: SurfaceSpec, a) -> tuple[float, float]:
    """Gaussian and mean curvature (K, H); H is taken with the upward normal for graphs."""
    a = as_point(a)
    _check_surface_point(spec, a)
    if isinstance(spec, Sphere):
        return 1.0 / spec.radius**2, 1.0 / spec.radius
    x, y = a[0], a[1]
    for sx, sy in spec.singular:
        if math.hypot(x - sx, y - sy) <= TOL_ON_SHAPE:
            raise NonSmoothPointError(f"{spec.name} is not smooth at ({sx}, {sy})")
    fx, fy = (float(v) for v in spec.grad(x, y))
    fxx, fxy, fyy = (float(v) for v in spec.hess(x, y))
    g = 1.0 + fx * fx + fy * fy
    K = (fxx * fyy - fxy * fxy) / g**2
    H = ((1.0 + fy * fy) * fxx - 2.0 * fx * fy * fxy + (1.0 + fx * fx) * fyy) / (2.0 * g**1.5)
    return K, H


# --- probes -------------------------------------------------------------------

def curve_probes(spec: CurveSpec, n: int) -> np.ndarray:
    """n points equally spaced in arc length."""
    if isinstance(spec, Circle):
        t = 2.0 * math.pi * np.arange(n) / n
        return np.column_stack([np.cos(t), np.sin(t)]) * spec.radius + np.asarray(spec.center)
    _, s = spec.arclength_table
    x = spec.x_at_arclength((np.arange(n) + 0.5) / n * s[-1])
    return np.column_stack([x, spec.f(x)])


def surface_probes(spec: SurfaceSpec, n: int) -> np.ndarray:
    """n probe points: a Fibonacci lattice on spheres, a centred grid on graphs."""
    if isinstance(spec, Sphere):
        k = np.arange(n) + 0.5
        z = 1.0 - 2.0 * k / n
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        rho = np.sqrt(1.0 - z * z)
        unit = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
        return unit * spec.radius + np.asarray(spec.center)
    x0, x1, y0, y1 = spec.domain
    side = math.ceil(math.sqrt(n))
    gx = x0 + (np.arange(side) + 0.5) / side * (x1 - x0)
    gy = y0 + (np.arange(side) + 0.5) / side * (y1 - y0)
    xx, yy = (v.ravel()[:n] for v in np.meshgrid(gx, gy))
    return np.column_stack([xx, yy, spec.f(xx, yy)])


# --- catalog ------------------------------------------------------------------

def _cone_grad(x, y):
    r = np.hypot(x, y)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, x / safe, 0.0), np.where(r > 0, y / safe, 0.0)


def _cone_hess(x, y):
    r3 = np.hypot(x, y) ** 3
    return y * y / r3, -x * y / r3, x * x / r3


def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


CURVES: dict[str, CurveSpec] = {
    "circle-r5": Circle((0.0, 0.0), 5.0, "circle-r5", "x^2 + y^2 = 25", (4.0, 3.0)),
    "poly-x3": GraphCurve(
        lambda x: x**3 + 2 * x, lambda x: 3 * x**2 + 2, lambda x: 6 * x,
        0.0, 2.0, "poly-x3", "y = x^3 + 2x on [0, 2]", (1.0, 3.0),
    ),
    "poly-x4": GraphCurve(
        lambda x: 5 * x**4 + 2 * x, lambda x: 20 * x**3 + 2, lambda x: 60 * x**2,
        0.0, 2.0, "poly-x4", "y = 5x^4 + 2x on [0, 2]", (1.0, 7.0),
    ),
    "circle-r0.05": Circle((0.0, 0.0), 0.05, "circle-r0.05", "x^2 + y^2 = 0.0025", (0.0, 0.05)),
    "log-quartic": GraphCurve(
        lambda x: np.log(x**4 + 1) + 5 * x**2,
        lambda x: 4 * x**3 / (x**4 + 1) + 10 * x,
        lambda x: (12 * x**2 * (x**4 + 1) - 16 * x**6) / (x**4 + 1) ** 2 + 10,
        -1.0, 1.0, "log-quartic", "y = ln(x^4 + 1) + 5x^2 on [-1, 1]", (0.0, 0.0),
    ),
    "line": GraphCurve(_zero, _zero, _zero, 0.0, 1.0, "line", "y = 0 on [0, 1]", (0.5, 0.0)),
    "unit-circle": Circle((0.0, 0.0), 1.0, "unit-circle", "x^2 + y^2 = 1", (1.0, 0.0)),
}

SURFACES: dict[str, SurfaceSpec] = {
    "sphere-r5": Sphere((0.0, 0.0, 0.0), 5.0, "sphere-r5", "x^2 + y^2 + z^2 = 25", (0.0, 0.0, 5.0)),
    "cubic-graph": GraphSurface(
        lambda x, y: x**3 + 2 * x + y**2 + y,
        lambda x, y: (3 * x**2 + 2, 2 * y + 1),
        lambda x, y: (6 * x, 0 * x, 2 + 0 * x),
        (-1.0, 3.0, 0.0, 4.0), "cubic-graph", "z = x^3 + 2x + y^2 + y on [-1,3]x[0,4]",
        (1.0, 2.0, 9.0),
    ),
    "cone": GraphSurface(
        lambda x, y: np.hypot(x, y), _cone_grad, _cone_hess,
        (-1.0, 3.0, 0.0, 4.0), "cone", "z = sqrt(x^2 + y^2) on [-1,3]x[0,4]",
        (1.0, 2.0, math.sqrt(5.0)), singular=((0.0, 0.0),),
    ),
    "paraboloid": GraphSurface(
        lambda x, y: x**2 + 0.25 * y**2,
        lambda x, y: (2 * x, 0.5 * y),
        lambda x, y: (2 + 0 * x, 0 * x, 0.5 + 0 * x),
        (-1.0, 3.0, 0.0, 4.0), "paraboloid", "z = x^2 + 0.25y^2 on [-1,3]x[0,4]",
        (1.0, 2.0, 2.0),
    ),
    "plane": GraphSurface(
        lambda x, y: 0 * x, lambda x, y: (0 * x, 0 * x), lambda x, y: (0 * x, 0 * x, 0 * x),
        (0.0, 1.0, 0.0, 1.0), "plane", "z = 0 on [0,1]^2", (0.5, 0.5, 0.0),
    ),
    "unit-sphere": Sphere((0.0, 0.0, 0.0), 1.0, "unit-sphere", "x^2 + y^2 + z^2 = 1", (0.0, 0.0, 1.0)),
}


def get_shape(name: str) -> CurveSpec | SurfaceSpec:
    if name in CURVES:
        return CURVES[name]
    if name in SURFACES:
        return SURFACES[name]
    raise KeyError(f"unknown shape {name!r}; known: {sorted(CURVES) + sorted(SURFACES)}")
