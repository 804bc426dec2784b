"""One test per acceptance criterion; each records a single PASS/FAIL line.

The lines are printed in the terminal summary (see conftest.py) and also
with ``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from cloudcurv import (
    circumradius,
    curve_bound,
    generic_pair_bound,
    menger_curvature,
    oracle_min_m,
    principal_curvature_1,
    radicand_positive,
    surface_bound,
)
from cloudcurv.cli import main
from cloudcurv.validation import benchmark_tables, summarize, validate_curve_bound, validate_surface_bound

sys.path.insert(0, str(Path(__file__).parent))
from conftest import ACCEPTANCE_LINES  # noqa: E402
from test_surface import _bumpy_cloud, ref_kappa1  # noqa: E402

SEEDS = 11

# pinned tolerances
TABLE1_REL = 0.05
POLY_X3_REL = 0.10
POLY_X3_TRUTH = 0.045258
SPHERE_REL = 0.05
GRAPH_REL = 0.15
SLACK = 0.02
INVARIANCE_REL = 1e-9
PERMUTATION_REL = 1e-12
CIRCLE_REL = 1e-9

TABLE1_TRUTH = {"circle-r5": 0.2, "poly-x4": 0.005617, "circle-r0.05": 20.0, "log-quartic": 10.0}
TABLE2_TRUTH = {"sphere-r5": (0.04, SPHERE_REL), "cubic-graph": (0.004614, GRAPH_REL),
                "paraboloid": (1 / 36, GRAPH_REL)}


def _record(n, ok, detail, t0):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - t0:.1f} s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    assert ok, line


def _mostly_ran(summary):
    # a single draw may miss its witnesses with probability up to 1 - p, which
    # the benchmark records per row; require most runs to produce an estimate
    return summary.median_estimate is not None and summary.failures < summary.runs / 2


def _summaries(tables):
    return {s.shape: s for s in summarize(benchmark_tables(0, repeats=SEEDS, tables=tables))}


def test_criterion_1_table1():
    t0 = time.perf_counter()
    summ = _summaries((1,))
    parts, ok = [], True
    for name, truth in TABLE1_TRUTH.items():
        s = summ[name]
        good = s.median_estimate is not None and abs(s.median_estimate - truth) <= TABLE1_REL * truth
        ok &= good
        parts.append(f"{name} median={s.median_estimate} ({s.failures} failed runs)")
    px3 = summ["poly-x3"]
    good = _mostly_ran(px3) and abs(px3.median_estimate - POLY_X3_TRUTH) <= POLY_X3_REL * POLY_X3_TRUTH
    ok &= good
    parts.append(f"poly-x3 median={px3.median_estimate} ({px3.failures} failed runs)")
    _record(1, ok, "; ".join(parts), t0)


def test_criterion_2_table2():
    t0 = time.perf_counter()
    summ = _summaries((2,))
    parts, ok = [], True
    for name, (truth, tol) in TABLE2_TRUTH.items():
        s = summ[name]
        good = s.median_estimate is not None and abs(s.median_estimate - truth) <= tol * truth
        ok &= good
        parts.append(f"{name} median K={s.median_estimate} vs {truth:.6g} (tol {tol:.0%})")
    cone = summ["cone"]
    ok &= _mostly_ran(cone) and cone.flag == "reference-discrepancy"
    parts.append(f"cone K={cone.median_estimate} ({cone.failures} failed runs) flag={cone.flag}")
    _record(2, ok, "; ".join(parts), t0)


def test_criterion_3_bound_soundness():
    t0 = time.perf_counter()
    c = validate_curve_bound("circle-r5", 0.1, 0.1, 200, 32, 0)
    s = validate_surface_bound("sphere-r5", 0.1, 0.1, 100, 16, 0)
    ok = c.wilson_lower >= 0.1 - SLACK and s.wilson_lower >= 0.1 - SLACK
    _record(3, ok, f"curve rate={c.empirical_rate} lower={c.wilson_lower:.4f}; "
                   f"surface rate={s.empirical_rate} lower={s.wilson_lower:.4f}", t0)


def test_criterion_4_closed_form_vs_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    bad = 0
    for _ in range(1000):
        alpha, n, p = rng.uniform(0.01, 0.95), int(rng.integers(1, 10**4)), rng.uniform(0.01, 0.99)
        c, o = generic_pair_bound(alpha, n, p).m_min, oracle_min_m(alpha, n, p)
        bad += not (o <= c <= o + 1)
    ps = np.linspace(0.02, 0.98, 20)
    cm = [curve_bound(10 * math.pi, 0.1, p).m_min for p in ps]
    sm = [surface_bound(100 * math.pi, 0.1, 0.01, p).m_min for p in ps]
    mono = cm == sorted(cm) and sm == sorted(sm)
    _record(4, bad == 0 and mono, f"{bad} of 1000 configurations disagree; monotone in p: {mono}", t0)


def test_criterion_5_geometry():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = {"permutation": 0.0, "rigid": 0.0, "scaling": 0.0}
    for t in rng.standard_normal((1000, 3, 3)):
        vals = [menger_curvature(*t[list(p)]) for p in itertools.permutations(range(3))]
        worst["permutation"] = max(worst["permutation"], (max(vals) - min(vals)) / max(vals))
    for dim in (2, 3):
        for t in rng.standard_normal((1000, 3, dim)):
            q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
            R = q * np.sign(np.diag(r))
            k = menger_curvature(*t)
            worst["rigid"] = max(worst["rigid"], abs(menger_curvature(*(t @ R.T + rng.uniform(-10, 10, dim))) - k) / k)
    for t in rng.standard_normal((1000, 3, 3)):
        s = 10 ** rng.uniform(-3, 3)
        k = menger_curvature(*t)
        worst["scaling"] = max(worst["scaling"], abs(menger_curvature(*(s * t)) * s - k) / k)
    circle = 0.0
    for k in range(-2, 3):
        rho = 10.0**k
        for _ in range(200):
            theta = np.sort(rng.uniform(0, 2 * np.pi, 3))
            if np.min(np.diff(np.r_[theta, theta[0] + 2 * np.pi])) < 1e-2:
                continue
            pts = rng.uniform(-5, 5, 2) + rho * np.column_stack([np.cos(theta), np.sin(theta)])
            circle = max(circle, abs(circumradius(*pts) - rho) / rho)
    ok = (worst["permutation"] <= PERMUTATION_REL and worst["rigid"] <= INVARIANCE_REL
          and worst["scaling"] <= INVARIANCE_REL and circle <= CIRCLE_REL)
    detail = ", ".join(f"{k} {v:.2e}" for k, v in worst.items())
    _record(5, ok, f"worst relative deviations: {detail}, circle radius {circle:.2e}", t0)


def test_criterion_6_brute_force_equivalence():
    t0 = time.perf_counter()
    matches = 0
    for seed in range(20):
        cloud, a = _bumpy_cloud(100 + seed, m=60 + 7 * seed)
        matches += principal_curvature_1(cloud, a, 0.6) == ref_kappa1(cloud.points, a, 0.6)
    _record(6, matches == 20, f"{matches} of 20 clouds identical (kappa1 and witnesses)", t0)


def test_criterion_7_radicand():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    bad = 0
    for _ in range(10_000):
        eps = 10 ** rng.uniform(-4, 1)
        l = eps * 10 ** rng.uniform(0, 4)
        bad += not radicand_positive(l, eps, rng.uniform(1e-6, 1 - 1e-6))
    _record(7, bad == 0, f"{bad} of 10000 triples with non-positive radicand", t0)


def test_criterion_8_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    out = tmp_path / "bench"
    runs = []
    for _ in range(2):
        assert main(["benchmark", "--seed", "7", "-o", str(out)]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    stdout = capsys.readouterr().out
    half = len(stdout) // 2
    same = runs[0] == runs[1] and stdout[:half] == stdout[half:]
    rows = len(json.loads(runs[0]["benchmark.json"])["result"]["rows"])
    with capsys.disabled():
        _record(8, same, f"two runs of benchmark --seed 7, {rows} rows, files {sorted(runs[0])} identical: {same}", t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
