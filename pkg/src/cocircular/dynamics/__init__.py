"""Equations of motion and orbit validation."""

from cocircular.dynamics.equations import curved_rhs, planar_rhs
from cocircular.dynamics.integrator import (
    integrate,
    orbit_residual,
    trace_orbit,
    trajectory_frame,
    write_trajectory_csv,
)

__all__ = [
    "curved_rhs",
    "integrate",
    "orbit_residual",
    "planar_rhs",
    "trace_orbit",
    "trajectory_frame",
    "write_trajectory_csv",
]
