"""
Trajectory files. CSV columns are
t, x_0..x_n, xi_0..xi_{n-1}, u_0..u_{m-1}, [phi], min_margin
with every value written to 17 significant digits so a read-back is exact.
"""

import csv
import json
import logging
from dataclasses import asdict
from typing import Dict, List

import numpy as np

from Simulation.simulator import Trajectory

logger = logging.getLogger(__name__)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def trajectory_columns(traj: Trajectory) -> List[str]:
    first = traj.samples[0]
    cols = ["t"]
    cols += [f"x_{i}" for i in range(first.x.size)]
    cols += [f"xi_{i}" for i in range(first.xi.size)]
    cols += [f"u_{i}" for i in range(first.u.size)]
    if traj.has_phi:
        cols.append("phi")
    cols.append("min_margin")
    return cols


def _row(traj: Trajectory, sample) -> List[float]:
    row = [sample.t, *sample.x, *sample.xi, *sample.u]
    if traj.has_phi:
        row.append(sample.phi)
    row.append(sample.min_margin)
    return row


def write_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(trajectory_columns(traj))
        for s in traj.samples:
            writer.writerow([_fmt(float(v)) for v in _row(traj, s)])


def write_json(traj: Trajectory, path: str) -> None:
    cols = trajectory_columns(traj)
    doc = {
        "columns": cols,
        "rows": [[float(v) for v in _row(traj, s)] for s in traj.samples],
        "summary": asdict(traj.summary) if traj.summary is not None else None,
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)


def write_trajectory(traj: Trajectory, path: str, fmt: str = "csv") -> None:
    if not traj.samples:
        raise ValueError("trajectory has no samples")
    if fmt == "csv":
        write_csv(traj, path)
    elif fmt == "json":
        write_json(traj, path)
    else:
        raise ValueError(f"unknown trajectory format {fmt!r}")
    logger.info("wrote %d samples to %s", len(traj.samples), path)


def read_trajectory_csv(path: str) -> Dict[str, np.ndarray]:
    """Column name -> float array."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [[float(v) for v in r] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, j] for j, name in enumerate(header)}
