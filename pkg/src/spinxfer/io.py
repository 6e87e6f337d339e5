"""CSV / JSON writers shared by the experiment harness."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


def fmt(value) -> str:
    """Numbers at 17 significant digits; everything else via str()."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(value)


def write_csv(path: Path | str, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])
    return path


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(obj, **kwargs) -> str:
    return json.dumps(obj, default=_json_default, sort_keys=True, **kwargs)


def write_json(path: Path | str, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj, indent=2) + "\n", encoding="utf-8")
    return path


def write_jsonl(path: Path | str, records) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")
    return path


def trajectory_header(n_sites: int) -> list[str]:
    cols = ["time"]
    for k in range(1, n_sites + 1):
        cols += [f"re_c{k}", f"im_c{k}"]
    return cols + ["occ_first", "occ_last", "eps"]


def trajectory_rows(traj):
    amps = traj.amplitudes
    occ_first, occ_last, eps = traj.occ_first, traj.occ_last, traj.leakage
    for i, t in enumerate(traj.times):
        row = [t]
        for c in amps[i]:
            row += [c.real, c.imag]
        row += [occ_first[i], occ_last[i], eps[i]]
        yield row


def write_trajectory(path: Path | str, traj) -> Path:
    """Trajectory CSV: time, re/im of every c_k, occ_first, occ_last, eps."""
    return write_csv(path, trajectory_header(traj.n_sites), trajectory_rows(traj))


def read_csv(path: Path | str) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
