"""Command-line interface.

Exit codes: 0 success, 2 bad configuration, 3 too few samples, 4 estimation failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import curve_bound, surface_bound
from .curve import estimate_curve_curvature
from .errors import EstimationError, InsufficientSamples
from .io import dumps, read_cloud, result_document, write_cloud, write_rows_csv
from .shapes import CURVES, SURFACES, get_shape, sample_curve_uniform, sample_surface_uniform
from .surface import estimate_surface_curvature
from .validation import benchmark_tables, summarize, validate_curve_bound, validate_surface_bound

EXIT_OK, EXIT_CONFIG, EXIT_SAMPLES, EXIT_ESTIMATION = 0, 2, 3, 4

BENCH_COLUMNS = ["table", "shape_name", "probe", "quantity", "truth", "estimate", "abs_error",
                 "rel_error", "seed", "m", "reference_truth", "reference_estimate", "flag", "error"]


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)


def _point(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad point {text!r}; expected comma-separated numbers")
    if len(vals) not in (2, 3):
        raise argparse.ArgumentTypeError("a point needs 2 or 3 coordinates")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cloudcurv", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="minimum sample size for a curve or surface")
    kind = b.add_mutually_exclusive_group(required=True)
    kind.add_argument("--curve", action="store_true")
    kind.add_argument("--surface", action="store_true")
    b.add_argument("-l", "--length", type=float)
    b.add_argument("-s", "--area", type=float)
    b.add_argument("-e", "--epsilon", type=float, required=True)
    b.add_argument("-p", type=float, required=True)
    b.add_argument("--theta", type=float)
    b.add_argument("--printed", action="store_true", help="curve only: alternative formula grouping")

    s = sub.add_parser("sample", help="write a seeded point cloud")
    s.add_argument("--shape", required=True, choices=sorted(CURVES) + sorted(SURFACES))
    s.add_argument("-m", type=int, required=True)
    s.add_argument("--seed", type=int)
    s.add_argument("-o", "--output", required=True)

    ec = sub.add_parser("estimate-curve", help="curvature of a sampled plane curve")
    ec.add_argument("--cloud", required=True)
    ec.add_argument("--point", type=_point, required=True)
    ec.add_argument("-e", "--epsilon", type=float, required=True)
    ec.add_argument("-p", type=float, required=True)
    ec.add_argument("-l", "--length", type=float, required=True)

    es = sub.add_parser("estimate-surface", help="principal, Gaussian and mean curvature")
    es.add_argument("--cloud", required=True)
    es.add_argument("--point", type=_point, required=True)
    es.add_argument("-e", "--epsilon", type=float, required=True)
    es.add_argument("-p", type=float, required=True)
    es.add_argument("-s", "--area", type=float, required=True)
    es.add_argument("--theta", type=float)
    es.add_argument("--scope", choices=("full", "local"), default="full")

    v = sub.add_parser("validate", help="Monte-Carlo check of a coverage bound")
    kind = v.add_mutually_exclusive_group(required=True)
    kind.add_argument("--curve", action="store_true")
    kind.add_argument("--surface", action="store_true")
    v.add_argument("--shape", required=True)
    v.add_argument("-e", "--epsilon", type=float, required=True)
    v.add_argument("-p", type=float, required=True)
    v.add_argument("--trials", type=int, required=True)
    v.add_argument("--probes", type=int, required=True)
    v.add_argument("--seed", type=int)
    v.add_argument("-m", type=int, help="override the sample size")

    bm = sub.add_parser("benchmark", help="reproduce the curve and surface tables")
    bm.add_argument("--seed", type=int)
    bm.add_argument("-o", "--output", required=True)
    bm.add_argument("--repeats", type=int, default=1)
    bm.add_argument("--tables", default="1,2")
    bm.add_argument("--scope", choices=("full", "local"), default="full")
    return ap


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(ns).items() if k != "command"}
    cfg = RunConfig(ns.command, params)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    p = cfg.params
    if cfg.command in ("sample", "validate", "benchmark") and p.get("seed") is None:
        raise ConfigError(f"{cfg.command} requires --seed")
    if cfg.command == "bound":
        if p["curve"] and p["length"] is None:
            raise ConfigError("bound --curve requires -l/--length")
        if p["surface"] and p["area"] is None:
            raise ConfigError("bound --surface requires -s/--area")
    if cfg.command == "validate":
        kind = CURVES if p["curve"] else SURFACES
        if p["shape"] not in kind:
            raise ConfigError(f"unknown {'curve' if p['curve'] else 'surface'} {p['shape']!r}")
    if cfg.command == "sample" and p["m"] < 1:
        raise ConfigError("-m must be positive")
    if cfg.command == "benchmark":
        try:
            p["tables"] = [int(t) for t in str(p["tables"]).split(",")]
        except ValueError:
            raise ConfigError("--tables takes a comma-separated list of 1 and 2")
        if not set(p["tables"]) <= {1, 2} or p["repeats"] < 1:
            raise ConfigError("--tables must list 1 and/or 2 and --repeats must be positive")


def _emit(cfg: RunConfig, result, out=None) -> None:
    (out or sys.stdout).write(dumps(result_document(cfg.command, cfg.params, result)))


def run(cfg: RunConfig, out=None) -> int:
    p = cfg.params
    if cfg.command == "bound":
        if p["curve"]:
            res = curve_bound(p["length"], p["epsilon"], p["p"], printed=p["printed"])
        else:
            res = surface_bound(p["area"], p["epsilon"], p["theta"], p["p"])
        _emit(cfg, res.to_dict(), out)
    elif cfg.command == "sample":
        spec = get_shape(p["shape"])
        sampler = sample_curve_uniform if p["shape"] in CURVES else sample_surface_uniform
        cloud = sampler(spec, p["m"], p["seed"])
        write_cloud(cloud, p["output"])
        _emit(cfg, {"points": len(cloud), "dim": cloud.dim, "path": p["output"]}, out)
    elif cfg.command == "estimate-curve":
        cloud = read_cloud(p["cloud"])
        est = estimate_curve_curvature(cloud, np.asarray(p["point"]), p["epsilon"], p["p"], p["length"])
        _emit(cfg, est.to_dict(), out)
    elif cfg.command == "estimate-surface":
        cloud = read_cloud(p["cloud"])
        est = estimate_surface_curvature(cloud, np.asarray(p["point"]), p["epsilon"], p["p"],
                                         p["area"], p["theta"], scope=p["scope"])
        _emit(cfg, est.to_dict(), out)
    elif cfg.command == "validate":
        fn = validate_curve_bound if p["curve"] else validate_surface_bound
        rep = fn(p["shape"], p["epsilon"], p["p"], p["trials"], p["probes"], p["seed"], m=p["m"])
        _emit(cfg, rep.to_dict(), out)
    elif cfg.command == "benchmark":
        outdir = Path(p["output"])
        outdir.mkdir(parents=True, exist_ok=True)
        rows = benchmark_tables(p["seed"], p["repeats"], tables=tuple(p["tables"]), scope=p["scope"])
        for t in p["tables"]:
            write_rows_csv([r.to_dict() for r in rows if r.table == t], outdir / f"table{t}.csv",
                           BENCH_COLUMNS)
        doc = result_document(cfg.command, cfg.params, {
            "rows": [r.to_dict() for r in rows],
            "summary": [s.to_dict() for s in summarize(rows)],
        })
        (outdir / "benchmark.json").write_text(dumps(doc), encoding="utf-8")
        _emit(cfg, {"rows": len(rows), "output": str(outdir)}, out)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except InsufficientSamples as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SAMPLES
    except EstimationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
