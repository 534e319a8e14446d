"""Trajectory CSV loading and the small amount of rotation math the
panels need.

The file format is the solver's trajectory schema: header
k,t,R11..R33,wx,wy,wz,tx,ty,tz, one row per step, with the velocity cells
blank in the final row.  The rotation logarithm is reimplemented here on
purpose (this package only consumes files, never the solver's code); it
is validated against a test-vector file the solver emits.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

EXPECTED_HEADER = ["k", "t", "R11", "R12", "R13", "R21", "R22", "R23",
                   "R31", "R32", "R33", "wx", "wy", "wz", "tx", "ty", "tz"]

# below this angle the axis is left undefined and samples are masked
AXIS_EPS = 1e-9


class SchemaError(ValueError):
    """The CSV does not match the trajectory schema."""


@dataclass
class TrajectoryFrame:
    times: np.ndarray       # (N+1,)
    attitudes: np.ndarray   # (N+1, 3, 3)
    omegas: np.ndarray      # (N, 3)
    torques: np.ndarray     # (N+1, 3)

    @property
    def n_steps(self) -> int:
        return self.attitudes.shape[0] - 1


def log_so3(R):
    """Rotation logarithm as a 3-vector (angle times unit axis).

    Angle from atan2 of the skew part's magnitude against the trace
    cosine; below 1e-8 the skew vector itself is returned.
    """
    w = 0.5 * np.array([R[2, 1] - R[1, 2],
                        R[0, 2] - R[2, 0],
                        R[1, 0] - R[0, 1]])
    s = np.linalg.norm(w)
    c = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arctan2(s, c)
    if theta < 1e-8:
        return w
    return w * (theta / s)


def load_frame(path) -> TrajectoryFrame:
    """Parse a trajectory CSV, checking the schema and warning about
    attitudes that are off the rotation group by more than 1e-6."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file")
        if header != EXPECTED_HEADER:
            raise SchemaError(f"{path}: header {header!r} does not match the "
                              f"trajectory schema")
        rows = list(reader)
    if len(rows) < 2:
        raise SchemaError(f"{path}: expected at least 2 data rows")
    n = len(rows) - 1

    times = np.empty(n + 1)
    attitudes = np.empty((n + 1, 3, 3))
    omegas = np.empty((n, 3))
    torques = np.empty((n + 1, 3))
    for k, row in enumerate(rows):
        if len(row) != len(EXPECTED_HEADER):
            raise SchemaError(f"{path}: row {k} has {len(row)} fields")
        try:
            if int(row[0]) != k:
                raise SchemaError(f"{path}: row {k} is labeled k={row[0]}")
            times[k] = float(row[1])
            attitudes[k] = np.array([float(x) for x in row[2:11]]).reshape(3, 3)
            if k < n:
                omegas[k] = [float(x) for x in row[11:14]]
            elif any(cell != "" for cell in row[11:14]):
                raise SchemaError(f"{path}: final row must leave the "
                                  f"velocity cells blank")
            torques[k] = [float(x) for x in row[14:17]]
        except ValueError as err:
            raise SchemaError(f"{path}: row {k}: {err}") from err

    worst = max(float(np.linalg.norm(R.T @ R - np.eye(3)))
                for R in attitudes)
    if worst > 1e-6:
        warnings.warn(f"{path}: attitude orthogonality defect {worst:.2e} "
                      f"exceeds 1e-6", stacklevel=2)
    return TrajectoryFrame(times=times, attitudes=attitudes, omegas=omegas,
                           torques=torques)


def axis_angle_series(frame: TrajectoryFrame):
    """Per-step rotation angle |log R_k| and unit axis; axis samples are
    NaN-masked where the angle is below 1e-9."""
    n = frame.n_steps
    angles = np.empty(n + 1)
    axes = np.full((n + 1, 3), np.nan)
    for k in range(n + 1):
        v = log_so3(frame.attitudes[k])
        angles[k] = np.linalg.norm(v)
        if angles[k] >= AXIS_EPS:
            axes[k] = v / angles[k]
    return angles, axes


def rotation_axis_series(frame: TrajectoryFrame):
    """Instantaneous rotation axis W_k / |W_k|, NaN-masked where the
    angular velocity is below 1e-9."""
    norms = np.linalg.norm(frame.omegas, axis=1)
    axes = np.full_like(frame.omegas, np.nan)
    mask = norms >= AXIS_EPS
    axes[mask] = frame.omegas[mask] / norms[mask, None]
    return axes
