import math

import numpy as np
import pytest
from scipy import integrate, stats

from cloudcurv import (
    CURVES,
    SURFACES,
    NonSmoothPointError,
    OffShapeError,
    curve_curvature_oracle,
    curve_length,
    get_shape,
    sample_curve_uniform,
    sample_surface_uniform,
    surface_area,
    surface_curvature_oracle,
)
from cloudcurv.shapes import Circle, GraphCurve, GraphSurface, Sphere, curve_probes, surface_probes


def _polyline_length(spec, n=10**6):
    x = np.linspace(spec.x0, spec.x1, n + 1)
    return float(np.hypot(np.diff(x), np.diff(spec.f(x))).sum())


def test_curve_lengths():
    assert curve_length(get_shape("circle-r5")) == pytest.approx(10 * math.pi, rel=1e-15)
    assert curve_length(get_shape("line")) == pytest.approx(1.0, rel=1e-12)
    for name in ("poly-x3", "poly-x4", "log-quartic"):
        spec = get_shape(name)
        assert curve_length(spec) == pytest.approx(_polyline_length(spec), rel=1e-8)


def test_surface_areas():
    assert surface_area(get_shape("sphere-r5")) == pytest.approx(100 * math.pi, rel=1e-15)
    assert surface_area(get_shape("plane")) == pytest.approx(1.0, rel=1e-10)


def test_paraboloid_area_monte_carlo():
    spec = GraphSurface(lambda x, y: x**2 + 0.25 * y**2, lambda x, y: (2 * x, 0.5 * y), None,
                        (-2.0, 2.0, -2.0, 2.0), "p")
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-2, 2, (2, 10**7))
    mc = 16 * float(spec.area_element(x, y).mean())
    assert surface_area(spec) == pytest.approx(mc, rel=5e-4)


def test_curve_sampler_on_shape_and_deterministic():
    c = sample_curve_uniform(get_shape("unit-circle"), 4, seed=3)
    assert np.allclose((c.points**2).sum(1), 1.0, atol=1e-12)
    for name in CURVES:
        spec = get_shape(name)
        a = sample_curve_uniform(spec, 500, seed=11)
        b = sample_curve_uniform(spec, 500, seed=11)
        assert np.array_equal(a.points, b.points)
        if isinstance(spec, GraphCurve):
            assert np.all(np.abs(a.points[:, 1] - spec.f(a.points[:, 0])) <= 1e-10 * (1 + np.abs(a.points[:, 1])))
    with pytest.raises(ValueError):
        sample_curve_uniform(get_shape("line"), 0, seed=1)


def test_line_sampler_mean():
    c = sample_curve_uniform(get_shape("line"), 10**5, seed=5)
    assert abs(c.points[:, 0].mean() - 0.5) < 0.005


@pytest.mark.parametrize("name", ["poly-x3", "poly-x4", "log-quartic", "circle-r5"])
def test_curve_sampler_uniform_in_arc_length(name):
    spec = get_shape(name)
    m, bins = 10**5, 50
    pts = sample_curve_uniform(spec, m, seed=21).points
    l = curve_length(spec)
    if isinstance(spec, Circle):
        s = (np.arctan2(pts[:, 1] - spec.center[1], pts[:, 0] - spec.center[0]) % (2 * np.pi)) * spec.radius
    else:
        # independent dense-grid arc length, not the sampler's own table
        xs = np.linspace(spec.x0, spec.x1, 10**6 + 1)
        ss = integrate.cumulative_trapezoid(spec.speed(xs), xs, initial=0.0)
        s = np.interp(pts[:, 0], xs, ss)
    counts, _ = np.histogram(s, bins=bins, range=(0, l))
    assert stats.chisquare(counts).pvalue > 0.01


def test_surface_sampler_on_shape_and_deterministic():
    c = sample_surface_uniform(get_shape("sphere-r5"), 100, seed=1)
    assert np.allclose(np.linalg.norm(c.points, axis=1), 5.0, atol=1e-10)
    for name in SURFACES:
        spec = get_shape(name)
        a = sample_surface_uniform(spec, 300, seed=8)
        b = sample_surface_uniform(spec, 300, seed=8)
        assert np.array_equal(a.points, b.points)
        if isinstance(spec, GraphSurface):
            assert np.all(np.abs(a.points[:, 2] - spec.f(a.points[:, 0], a.points[:, 1])) <= 1e-10)


def test_sphere_symmetry():
    m = 10**5
    z = sample_surface_uniform(get_shape("unit-sphere"), m, seed=2).points[:, 2]
    assert abs(z.mean()) < 3 / math.sqrt(m)
    # Archimedes: z is uniform on [-1, 1]
    counts, _ = np.histogram(z, bins=20, range=(-1, 1))
    assert stats.chisquare(counts).pvalue > 0.01


def test_plane_sampler_uniform():
    pts = sample_surface_uniform(get_shape("plane"), 10**5, seed=4).points
    counts, _, _ = np.histogram2d(pts[:, 0], pts[:, 1], bins=10, range=[[0, 1], [0, 1]])
    assert stats.chisquare(counts.ravel()).pvalue > 0.01


@pytest.mark.parametrize("name", ["paraboloid", "cubic-graph"])
def test_graph_sampler_uniform_in_area(name):
    spec = get_shape(name)
    x0, x1, y0, y1 = spec.domain
    pts = sample_surface_uniform(spec, 10**5, seed=6).points
    counts, ex, ey = np.histogram2d(pts[:, 0], pts[:, 1], bins=8, range=[[x0, x1], [y0, y1]])
    cell = np.array([[integrate.dblquad(lambda y, x: float(spec.area_element(x, y)), ex[i], ex[i + 1],
                                        ey[j], ey[j + 1])[0] for j in range(8)] for i in range(8)])
    expected = cell / cell.sum() * counts.sum()
    assert stats.chisquare(counts.ravel(), expected.ravel()).pvalue > 0.01


def test_curve_oracle_values():
    assert curve_curvature_oracle(get_shape("circle-r5"), (4, 3)) == pytest.approx(0.2, rel=1e-14)
    assert curve_curvature_oracle(get_shape("poly-x4"), (1, 7)) == pytest.approx(60 / 485**1.5, rel=1e-14)
    assert curve_curvature_oracle(get_shape("poly-x4"), (1, 7)) == pytest.approx(0.005617, abs=5e-7)
    assert curve_curvature_oracle(get_shape("poly-x3"), (1, 3)) == pytest.approx(6 / 26**1.5, rel=1e-14)
    assert curve_curvature_oracle(get_shape("log-quartic"), (0, 0)) == pytest.approx(10.0, rel=1e-14)
    assert curve_curvature_oracle(get_shape("circle-r0.05"), (0, 0.05)) == pytest.approx(20.0, rel=1e-14)


def test_curve_oracle_circle_everywhere():
    spec = Circle((1.0, -2.0), 3.0)
    for t in np.linspace(0, 2 * np.pi, 17):
        a = (1 + 3 * math.cos(t), -2 + 3 * math.sin(t))
        assert curve_curvature_oracle(spec, a) == pytest.approx(1 / 3, rel=1e-14)


def test_surface_oracle_values():
    K, H = surface_curvature_oracle(get_shape("sphere-r5"), (0, 0, 5))
    assert (K, H) == (pytest.approx(0.04, rel=1e-14), pytest.approx(0.2, rel=1e-14))
    K, _ = surface_curvature_oracle(get_shape("paraboloid"), (1, 2, 2))
    assert K == pytest.approx(1 / 36, rel=1e-14)
    K, _ = surface_curvature_oracle(get_shape("cubic-graph"), (1, 2, 9))
    assert K == pytest.approx(12 / 2601, rel=1e-14)
    K, _ = surface_curvature_oracle(get_shape("cone"), (1, 2, math.sqrt(5)))
    assert K == pytest.approx(0.0, abs=1e-15)


def test_surface_oracle_sphere_everywhere():
    spec = Sphere((0.0, 1.0, 0.0), 2.0)
    for p in surface_probes(spec, 12):
        K, H = surface_curvature_oracle(spec, p)
        assert K == pytest.approx(0.25, rel=1e-12) and H == pytest.approx(0.5, rel=1e-12)


def test_oracle_errors():
    with pytest.raises(OffShapeError):
        curve_curvature_oracle(get_shape("circle-r5"), (4, 3.1))
    with pytest.raises(OffShapeError):
        surface_curvature_oracle(get_shape("paraboloid"), (1, 2, 2.5))
    with pytest.raises(NonSmoothPointError):
        surface_curvature_oracle(get_shape("cone"), (0, 0, 0))


def test_probes_lie_on_shapes():
    for name in CURVES:
        spec = get_shape(name)
        for a in curve_probes(spec, 8):
            curve_curvature_oracle(spec, a)
    for name in SURFACES:
        spec = get_shape(name)
        for a in surface_probes(spec, 9):
            surface_curvature_oracle(spec, a)


def test_catalog_probes_on_shape():
    for name in CURVES:
        curve_curvature_oracle(get_shape(name), get_shape(name).probe)
    for name in SURFACES:
        surface_curvature_oracle(get_shape(name), get_shape(name).probe)


def test_unknown_shape():
    with pytest.raises(KeyError):
        get_shape("torus")
