"""Render rigid-body maneuver trajectory CSVs into result-figure panels."""

from .frames import (SchemaError, TrajectoryFrame, axis_angle_series,
                     load_frame, log_so3, rotation_axis_series)
from .render import render

__version__ = "0.1.0"

__all__ = ["SchemaError", "TrajectoryFrame", "axis_angle_series",
           "load_frame", "log_so3", "rotation_axis_series", "render"]
