import math

import numpy as np
import pytest
from scipy import stats

from cloudcurv import get_shape
from cloudcurv.bounds import curve_bound
from cloudcurv.shapes import curve_probes
from cloudcurv.validation import (
    SLACK,
    BenchmarkRow,
    benchmark_tables,
    summarize,
    trial_seed,
    validate_curve_bound,
    validate_surface_bound,
    wilson_lower,
)


def _wilson_by_hand(k, n, z=1.959963984540054):
    ph = k / n
    centre = ph + z * z / (2 * n)
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n))
    return (centre - half) / (1 + z * z / n)


@pytest.mark.parametrize("k,n", [(0, 100), (8, 500), (31, 200), (100, 100), (57, 120)])
def test_wilson_lower_matches_formula(k, n):
    assert wilson_lower(k, n) == pytest.approx(max(0.0, _wilson_by_hand(k, n)), abs=1e-12)


def test_trial_seeds_distinct_and_stable():
    seeds = [trial_seed(3, t) for t in range(1000)]
    assert len(set(seeds)) == 1000
    assert seeds == [trial_seed(3, t) for t in range(1000)]
    assert trial_seed(3, 0) != trial_seed(4, 0)


def test_rejects_few_trials():
    with pytest.raises(ValueError):
        validate_curve_bound("line", 0.5, 0.5, 99, 8, 0)
    with pytest.raises(ValueError):
        validate_surface_bound("plane", 0.1, 0.1, 50, 4, 0)


def test_report_invariants_and_reproducibility():
    a = validate_curve_bound("circle-r5", 0.5, 0.3, 120, 16, 5)
    b = validate_curve_bound("circle-r5", 0.5, 0.3, 120, 16, 5)
    assert a == b
    assert 0 <= a.successes <= a.trials
    assert a.empirical_rate == a.successes / a.trials
    assert a.m_used == curve_bound(10 * math.pi, 0.5, 0.3).m_min
    assert a.claim_holds == (a.wilson_lower >= a.claimed_p - SLACK)


def test_weak_claim_trivially_met():
    rep = validate_curve_bound("circle-r5", 0.1, 0.01, 100, 32, 0)
    assert rep.empirical_rate >= 0.01


def _segment_rate_oracle(m, eps, probes, draws, seed):
    """Direct Monte-Carlo of the bracketing event on the unit segment."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, (draws, m))
    ok = np.ones(draws, bool)
    for c in (np.arange(probes) + 0.5) / probes:
        d = x - c
        ok &= np.any((d < 0) & (d > -eps), axis=1) & np.any((d > 0) & (d < eps), axis=1)
    return ok.mean()


def test_segment_harness_agrees_with_direct_simulation():
    rep = validate_curve_bound("line", 0.5, 0.5, 3000, 8, 1)
    assert rep.m_used == 3
    grid = curve_probes(get_shape("line"), 8)
    np.testing.assert_allclose(grid[:, 0], (np.arange(8) + 0.5) / 8)
    q = _segment_rate_oracle(3, 0.5, 8, 10**6, 1)
    assert stats.binomtest(rep.successes, rep.trials, q).pvalue > 0.01


def test_segment_example_rate():
    # the direct simulation above puts the true rate near 0.003 at m = 3
    rep = validate_curve_bound("line", 0.5, 0.5, 500, 8, 0)
    assert rep.empirical_rate >= 0.5 - SLACK


def test_plane_patch_surface_bound():
    rep = validate_surface_bound("plane", 0.1, 0.1, 100, 16, 0)
    assert rep.m_used == 130010
    assert rep.empirical_rate >= 0.1 - SLACK


def test_doubling_m_does_not_hurt():
    base = validate_curve_bound("circle-r5", 0.2, 0.2, 300, 16, 11)
    more = validate_curve_bound("circle-r5", 0.2, 0.2, 300, 16, 12, m=2 * base.m_used)
    # one-sided two-proportion z-test for a drop at level 0.01
    p1, p2 = base.empirical_rate, more.empirical_rate
    pool = (base.successes + more.successes) / 600
    se = math.sqrt(pool * (1 - pool) * (2 / 300)) or 1.0
    assert stats.norm.cdf((p2 - p1) / se) > 0.01


def test_benchmark_rows_and_summary():
    rows = benchmark_tables(3, repeats=2, tables=(1,))
    assert len(rows) == 10 and all(isinstance(r, BenchmarkRow) for r in rows)
    for r in rows:
        if r.estimate is not None:
            assert r.abs_error == abs(r.estimate - r.truth)
            assert r.rel_error == r.abs_error / abs(r.truth)
        else:
            assert r.error
    assert [r.seed for r in rows[:2]] == [3, 4]
    assert rows == benchmark_tables(3, repeats=2, tables=(1,))
    summary = {s.shape: s for s in summarize(rows)}
    assert summary["poly-x3"].flag == "reference-discrepancy"
    circle = summary["circle-r5"]
    assert circle.runs == 2 and circle.runs - circle.failures == len(circle.estimates)
    if circle.estimates:
        assert circle.median_estimate == float(np.median(circle.estimates))


def test_benchmark_records_errors_without_aborting():
    # seed 0 leaves the circle probe without a bracketing pair
    rows = benchmark_tables(0, tables=(1,), shapes=("circle-r5",))
    assert len(rows) == 1
    assert rows[0].estimate is None and rows[0].error
