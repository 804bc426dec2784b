"""Point-cloud CSV files and JSON result documents."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .geometry import PointCloud

TOOL = "cloudcurv"
_HEADERS = {2: "x,y", 3: "x,y,z"}


def write_cloud(cloud: PointCloud, path) -> None:
    """CSV with header ``x,y[,z]`` and 17 significant digits (lossless for float64)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, cloud.points, fmt="%.17g", delimiter=",", header=_HEADERS[cloud.dim], comments="")


def read_cloud(path) -> PointCloud:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().replace(" ", "")
        if header not in _HEADERS.values():
            raise ValueError(f"{path}: expected header 'x,y' or 'x,y,z', got {header!r}")
        pts = np.loadtxt(fh, delimiter=",", dtype=np.float64, ndmin=2)
    dim = header.count(",") + 1
    if pts.size == 0:
        raise ValueError(f"{path}: no points")
    if pts.shape[1] != dim:
        raise ValueError(f"{path}: rows have {pts.shape[1]} columns, header declares {dim}")
    return PointCloud(pts, {"source": str(path)})


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def result_document(command: str, params: dict, result) -> dict:
    from . import __version__

    return {"tool": TOOL, "version": __version__, "command": command,
            "params": _clean(params), "result": _clean(result)}


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_rows_csv(rows: list[dict], path, columns: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(["" if r[c] is None else _cell(r[c]) for c in columns])


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(repr(float(x)) for x in v)
    return v
