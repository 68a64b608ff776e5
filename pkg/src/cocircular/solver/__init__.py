"""Stationary-point solver, local-max certification and uniqueness experiments."""

from cocircular.solver.stationary import (
    StationarySolver,
    default_start,
    initial_radius,
    solve_stationary,
    verify_local_max,
)
from cocircular.solver.uniqueness import uniqueness_experiment

__all__ = [
    "StationarySolver",
    "default_start",
    "initial_radius",
    "solve_stationary",
    "uniqueness_experiment",
    "verify_local_max",
]
