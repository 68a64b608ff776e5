"""Right-hand sides of the planar and curved equations of motion."""

import numpy as np
import numpy.typing as npt

from cocircular.curved import curved_field
from cocircular.errors import DomainError
from cocircular.kernels import eval_f
from cocircular.models import CurvedState, InteractionKernel, PlanarState

FloatArray = npt.NDArray[np.float64]

COLLISION_DISTANCE = 1e-12
# A pair whose straight-line separation within a step comes closer than this
# fraction of its endpoint separation has tunnelled through a collision
TUNNEL_RATIO = 0.1


def planar_accelerations(positions: FloatArray, masses: FloatArray, kernel: InteractionKernel) -> FloatArray:
    """q_i'' = sum_j m_j (q_j - q_i) f(|q_j - q_i|)."""
    n = masses.size
    separation = positions[None, :, :] - positions[:, None, :]
    distance = np.linalg.norm(separation, axis=-1)
    off = ~np.eye(n, dtype=bool)
    if np.any(distance[off] <= COLLISION_DISTANCE):
        raise DomainError("collision: two bodies closer than the collision distance")
    weights = np.zeros((n, n))
    weights[off] = eval_f(kernel, distance[off])
    weights *= masses[None, :]
    return np.einsum("ij,ijk->ik", weights, separation)


def planar_rhs(state: PlanarState, kernel: InteractionKernel) -> FloatArray:
    return planar_accelerations(state.positions, np.asarray(state.masses), kernel)


def curved_rhs(state: CurvedState) -> FloatArray:
    """Full right-hand side on the curvature -1 sheet, including the (v.v) p term."""
    return curved_field(state.positions, state.velocities, state.masses)


def _closest_approach(start: FloatArray, end: FloatArray) -> FloatArray:
    """Minimum of |start + s (end - start)| over s in [0, 1], per row."""
    delta = end - start
    length_sq = np.sum(delta * delta, axis=-1)
    s = np.divide(-np.sum(start * delta, axis=-1), length_sq, out=np.zeros_like(length_sq), where=length_sq > 0)
    s = np.clip(s, 0.0, 1.0)
    return np.linalg.norm(start + s[:, None] * delta, axis=-1)


def check_separation(before: FloatArray, after: FloatArray) -> None:
    """Raise DomainError when a step lands on a collision or carries a pair through one.

    The separation of each pair is interpolated linearly across the step; a
    closest approach below TUNNEL_RATIO times the larger endpoint separation
    is a collision the step skipped over.
    """
    if not np.all(np.isfinite(after)):
        raise DomainError("collision: state became non-finite")
    n = after.shape[0]
    off = ~np.eye(n, dtype=bool)
    sep_before = (before[None, :, :] - before[:, None, :])[off]
    sep_after = (after[None, :, :] - after[:, None, :])[off]
    dist_after = np.linalg.norm(sep_after, axis=-1)
    if np.min(dist_after) <= COLLISION_DISTANCE:
        raise DomainError("collision: two bodies closer than the collision distance")
    radius = TUNNEL_RATIO * np.maximum(np.linalg.norm(sep_before, axis=-1), dist_after)
    if np.any(_closest_approach(sep_before, sep_after) <= radius):
        raise DomainError("collision: a pair passed through each other within one step")
