"""Hyperboloid geometry (curvature -1) and the reduction of rotating curved polygons.

Points live on the upper sheet x1^2 + x2^2 - x3^2 = -1 with the Minkowski
product p . q = p1 q1 + p2 q2 - p3 q3. A polygon (rho, gamma, z) rotating at
spin B is a relative equilibrium exactly when the planar problem with kernel h,
spin B and radius rho is stationary; frame_residuals and reduction_residuals
compute the same per-body residual from both sides.
"""

import math

import numpy as np
import numpy.typing as npt
import structlog

from cocircular.errors import DomainError, UsageError
from cocircular.models import (
    CircularConfig,
    CurvedPolygonConfig,
    HyperboloidPoint,
    InteractionKernel,
    ProblemSpec,
    Variant,
)
from cocircular.variational import residuals

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

# |p_i . p_j + 1| below this is a collision
SINGULARITY_GUARD = 1e-14


def _coords(p: HyperboloidPoint | npt.ArrayLike) -> FloatArray:
    if isinstance(p, HyperboloidPoint):
        return p.as_array()
    return np.asarray(p, dtype=float)


def minkowski(p: HyperboloidPoint | npt.ArrayLike, q: HyperboloidPoint | npt.ArrayLike) -> float | FloatArray:
    """p1 q1 + p2 q2 - p3 q3, broadcast over leading axes."""
    a, b = _coords(p), _coords(q)
    value = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]
    return float(value) if np.ndim(value) == 0 else value


def lift(config: CircularConfig, spin: float) -> CurvedPolygonConfig:
    """Place the circle of radius rho = r at height z = sqrt(1 + rho^2) on the upper sheet."""
    if config.masses.central is not None:
        raise UsageError("curved polygons take no central mass")
    return CurvedPolygonConfig(
        rho=config.r,
        gamma=config.alpha,
        z=math.hypot(1.0, config.r),
        spin=spin,
        masses=config.masses,
    )


def reduced_problem(config: CurvedPolygonConfig) -> tuple[ProblemSpec, CircularConfig]:
    """Planar problem with kernel h, spin B and radius rho whose stationary points are the curved ones."""
    spec = ProblemSpec(
        kernel=InteractionKernel.curved(),
        masses=config.masses,
        spin=config.spin,
        variant=Variant.CURVED,
    )
    return spec, config.planar()


def rigid_state(config: CurvedPolygonConfig, t: float = 0.0) -> tuple[FloatArray, FloatArray]:
    """Positions (T(Bt) P_i, z) and velocities of the rigid rotation at time t."""
    phase = config.angles + config.spin * t
    cos, sin = np.cos(phase), np.sin(phase)
    n = phase.size
    positions = np.column_stack((config.rho * cos, config.rho * sin, np.full(n, config.z)))
    velocities = config.spin * config.rho * np.column_stack((-sin, cos, np.zeros(n)))
    return positions, velocities


def curved_field(positions: FloatArray, velocities: FloatArray, masses: npt.ArrayLike) -> FloatArray:
    """Accelerations of the curved problem on the curvature -1 sheet.

    p_i'' = sum_j m_j (p_j + (p_i.p_j) p_i) / ((p_i.p_j)^2 - 1)^(3/2) + (p_i'.p_i') p_i
    """
    m = np.asarray(masses, dtype=float)
    n = m.size
    gram = positions[:, :2] @ positions[:, :2].T - np.outer(positions[:, 2], positions[:, 2])
    off = ~np.eye(n, dtype=bool)
    if np.any(np.abs(gram[off] + 1.0) < SINGULARITY_GUARD):
        raise DomainError("coincident bodies on the hyperboloid")

    weights = np.zeros((n, n))
    weights[off] = (gram[off] ** 2 - 1.0) ** -1.5
    weights *= m[None, :]

    speed_sq = minkowski(velocities, velocities)
    pull = weights @ positions
    along = (np.sum(weights * gram, axis=1) + speed_sq)[:, None] * positions
    return pull + along


def curved_acceleration(config: CurvedPolygonConfig, t: float, i: int) -> FloatArray:
    """Acceleration of body i (1-based) when the polygon rotates rigidly."""
    if not 1 <= i <= config.masses.n:
        raise IndexError(f"body index {i} outside 1..{config.masses.n}")
    positions, velocities = rigid_state(config, t)
    return curved_field(positions, velocities, config.masses.m)[i - 1]


def frame_residuals(config: CurvedPolygonConfig) -> FloatArray:
    """Acceleration minus rigid-rotation kinematics, first two entries in each body's frame.

    Row i is (T(-gamma_i) R_i, E_i) where R_i is the planar part of
    p_i'' - (-B^2 P_i) and E_i the third entry.
    """
    positions, velocities = rigid_state(config)
    defect = curved_field(positions, velocities, config.masses.m)
    defect[:, :2] += config.spin**2 * positions[:, :2]

    cos, sin = np.cos(config.angles), np.sin(config.angles)
    frame = np.empty_like(defect)
    frame[:, 0] = cos * defect[:, 0] + sin * defect[:, 1]
    frame[:, 1] = -sin * defect[:, 0] + cos * defect[:, 1]
    frame[:, 2] = defect[:, 2]
    return frame


def reduction_residuals(config: CurvedPolygonConfig) -> FloatArray:
    """frame_residuals predicted from the reduced planar residuals.

    Row i is (z^2 radial_i / m_i, -tangential_i / (m_i rho), z rho radial_i / m_i).
    """
    spec, planar = reduced_problem(config)
    radial, tangential = residuals(spec, planar)
    m = config.masses.values
    return np.column_stack(
        (
            config.z**2 * radial / m,
            -tangential / (m * config.rho),
            config.z * config.rho * radial / m,
        )
    )
