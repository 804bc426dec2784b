"""Monte-Carlo checks of the coverage bounds and reproduction of the reference tables."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import binomtest

from .bounds import curve_bound, surface_bound
from .curve import estimate_curve_curvature
from .errors import CloudCurvError, EstimationError
from .geometry import neighbors_within
from .shapes import (
    curve_curvature_oracle,
    curve_length,
    curve_probes,
    get_shape,
    sample_curve_uniform,
    sample_surface_uniform,
    surface_area,
    surface_curvature_oracle,
    surface_probes,
)
from .surface import estimate_surface_curvature

SLACK = 0.02
MIN_TRIALS = 100


@dataclass(frozen=True)
class TrialReport:
    shape: str
    kind: str
    epsilon: float
    probes: int
    seed: int
    trials: int
    successes: int
    empirical_rate: float
    claimed_p: float
    m_used: int
    wilson_lower: float
    claim_holds: bool
    event: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BenchmarkRow:
    table: int
    shape_name: str
    probe: tuple
    quantity: str
    truth: float
    estimate: float | None
    abs_error: float | None
    rel_error: float | None
    seed: int
    m: int
    reference_truth: float
    reference_estimate: float
    flag: str = ""
    error: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["probe"] = list(self.probe)
        return d


@dataclass(frozen=True)
class TableEntry:
    table: int
    shape: str
    quantity: str
    reference_truth: float
    reference_estimate: float
    flag: str = ""


TABLE1 = (
    TableEntry(1, "circle-r5", "kappa", 0.2, 0.200008),
    TableEntry(1, "poly-x3", "kappa", 0.004333, 0.004348, "reference-discrepancy"),
    TableEntry(1, "poly-x4", "kappa", 0.005617, 0.005762),
    TableEntry(1, "circle-r0.05", "kappa", 20.0, 19.999999),
    TableEntry(1, "log-quartic", "kappa", 10.0, 9.740785),
)
TABLE2 = (
    TableEntry(2, "sphere-r5", "gaussian", 0.04, 0.039999),
    TableEntry(2, "cubic-graph", "gaussian", 0.004618, 0.004204),
    TableEntry(2, "cone", "gaussian", 0.027777, 0.025705, "reference-discrepancy"),
    TableEntry(2, "paraboloid", "gaussian", 0.027777, 0.0240704),
)


def trial_seed(seed: int, trial: int) -> int:
    """Independent per-trial seed derived from (seed, trial)."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def wilson_lower(successes: int, trials: int, confidence: float = 0.95) -> float:
    return float(binomtest(successes, trials).proportion_ci(confidence, method="wilson").low)


def _report(name, kind, epsilon, probes, seed, trials, successes, p, m, event) -> TrialReport:
    lo = wilson_lower(successes, trials)
    return TrialReport(name, kind, float(epsilon), int(probes), int(seed), int(trials), int(successes),
                       successes / trials, float(p), int(m), lo, lo >= p - SLACK, event)


def _gate_size(bound) -> int:
    # the estimators require m strictly above the real-valued bound
    return max(bound.m_min, math.floor(bound.raw_value) + 1)


def _check_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise ValueError(f"at least {MIN_TRIALS} trials are required, got {trials}")


def _bracketed(cloud, a, epsilon) -> bool:
    idx, _ = neighbors_within(cloud, a, epsilon)
    if idx.size < 2:
        return False
    v = cloud.points[idx] - a
    return bool(np.any(v @ v.T < 0))


def validate_curve_bound(spec, epsilon: float, p: float, trials: int, probes: int, seed: int,
                         m: int | None = None) -> TrialReport:
    """Fraction of trials in which every probe has a bracketing pair within ``epsilon``.

    ``m`` overrides the sample size (default: the coverage bound).
    """
    spec = get_shape(spec) if isinstance(spec, str) else spec
    _check_trials(trials)
    l = curve_length(spec)
    m = m or curve_bound(l, min(l, epsilon), p).m_min
    grid = curve_probes(spec, probes)
    ok = 0
    for t in range(trials):
        cloud = sample_curve_uniform(spec, m, trial_seed(seed, t))
        ok += all(_bracketed(cloud, a, epsilon) for a in grid)
    return _report(spec.name, "curve", epsilon, probes, seed, trials, ok, p, m,
                   "every probe has an opposite-side pair within epsilon")


def validate_surface_bound(spec, epsilon: float, p: float, trials: int, probes: int, seed: int,
                           m: int | None = None, scope: str = "full") -> TrialReport:
    """Fraction of trials in which the surface estimator succeeds at every probe.

    This is a surrogate for the cone-coverage event: success means no
    estimation error at any probe.
    """
    spec = get_shape(spec) if isinstance(spec, str) else spec
    _check_trials(trials)
    s = surface_area(spec)
    m = m or _gate_size(surface_bound(s, epsilon, epsilon / 10.0, p))
    grid = surface_probes(spec, probes)
    ok = 0
    for t in range(trials):
        cloud = sample_surface_uniform(spec, m, trial_seed(seed, t))
        good = True
        for a in grid:
            try:
                estimate_surface_curvature(cloud, a, epsilon, p, s, scope=scope)
            except EstimationError:
                good = False
                break
        ok += good
        del cloud
    return _report(spec.name, "surface", epsilon, probes, seed, trials, ok, p, m,
                   "surrogate: surface estimator succeeds at every probe")


def _row(entry: TableEntry, seed: int, m: int, truth: float, estimate=None, error=None) -> BenchmarkRow:
    spec = get_shape(entry.shape)
    abs_err = rel_err = None
    if estimate is not None:
        abs_err = abs(estimate - truth)
        rel_err = abs_err / abs(truth) if truth != 0 else None
    return BenchmarkRow(entry.table, entry.shape, tuple(float(v) for v in spec.probe), entry.quantity,
                        float(truth), estimate, abs_err, rel_err, int(seed), int(m),
                        entry.reference_truth, entry.reference_estimate, entry.flag, error)


def _curve_row(entry: TableEntry, seed: int, epsilon: float, p: float) -> BenchmarkRow:
    spec = get_shape(entry.shape)
    l = curve_length(spec)
    m = curve_bound(l, min(l, epsilon), p).m_min
    a = np.asarray(spec.probe, dtype=float)
    truth = curve_curvature_oracle(spec, a)
    try:
        est = estimate_curve_curvature(sample_curve_uniform(spec, m, seed), a, epsilon, p, l)
    except CloudCurvError as exc:
        return _row(entry, seed, m, truth, error=f"{type(exc).__name__}: {exc}")
    return _row(entry, seed, m, truth, est.kappa)


def _surface_row(entry: TableEntry, seed: int, epsilon: float, p: float, scope: str) -> BenchmarkRow:
    spec = get_shape(entry.shape)
    s = surface_area(spec)
    m = _gate_size(surface_bound(s, epsilon, epsilon / 10.0, p))
    a = np.asarray(spec.probe, dtype=float)
    truth, _ = surface_curvature_oracle(spec, a)
    try:
        cloud = sample_surface_uniform(spec, m, seed)
        est = estimate_surface_curvature(cloud, a, epsilon, p, s, scope=scope)
    except CloudCurvError as exc:
        return _row(entry, seed, m, truth, error=f"{type(exc).__name__}: {exc}")
    return _row(entry, seed, m, truth, est.gaussian)


def benchmark_tables(seed: int, repeats: int = 1, *, tables=(1, 2), shapes=None,
                     epsilon: float = 0.1, p: float = 0.1, scope: str = "full") -> list[BenchmarkRow]:
    """One row per (shape, repeat); repeat k samples with seed ``seed + k``.

    Estimation failures are recorded in the row's ``error`` field.
    """
    rows = []
    entries = [e for e in TABLE1 + TABLE2 if e.table in tables and (shapes is None or e.shape in shapes)]
    for entry in entries:
        for k in range(repeats):
            if entry.table == 1:
                rows.append(_curve_row(entry, seed + k, epsilon, p))
            else:
                rows.append(_surface_row(entry, seed + k, epsilon, p, scope))
    return rows


@dataclass(frozen=True)
class ShapeSummary:
    shape: str
    quantity: str
    truth: float
    median_estimate: float | None
    median_rel_error: float | None
    runs: int
    failures: int
    flag: str = ""
    estimates: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(rows: list[BenchmarkRow]) -> list[ShapeSummary]:
    """Median estimate per shape over the successful rows."""
    out = []
    for name in dict.fromkeys(r.shape_name for r in rows):
        group = [r for r in rows if r.shape_name == name]
        ests = [r.estimate for r in group if r.estimate is not None]
        truth = group[0].truth
        med = float(np.median(ests)) if ests else None
        rel = abs(med - truth) / abs(truth) if med is not None and truth != 0 else None
        out.append(ShapeSummary(name, group[0].quantity, truth, med, rel, len(group),
                                len(group) - len(ests), group[0].flag, ests))
    return out
