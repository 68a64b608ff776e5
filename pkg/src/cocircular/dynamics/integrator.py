"""Fixed-step RK4 integration, rigid-rotation orbit checks and trajectory export."""

import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
import numpy.typing as npt
import pandas as pd
import structlog

from cocircular.configuration import positions as circle_positions
from cocircular.curved import curved_field, lift, minkowski, rigid_state
from cocircular.dynamics.equations import check_separation, planar_accelerations
from cocircular.errors import DomainError, UsageError
from cocircular.models import (
    TWO_PI,
    CircularConfig,
    CurvedState,
    Geometry,
    OrbitCheck,
    PlanarState,
    ProblemSpec,
    Trajectory,
    Variant,
)

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]
Acceleration = Callable[[FloatArray, FloatArray], FloatArray]

DEFAULT_STEPS_PER_PERIOD = 10_000


def _rk4_step(acceleration: Acceleration, pos: FloatArray, vel: FloatArray, h: float) -> tuple[FloatArray, FloatArray]:
    k1x, k1v = vel, acceleration(pos, vel)
    k2x, k2v = vel + 0.5 * h * k1v, acceleration(pos + 0.5 * h * k1x, vel + 0.5 * h * k1v)
    k3x, k3v = vel + 0.5 * h * k2v, acceleration(pos + 0.5 * h * k2x, vel + 0.5 * h * k2v)
    k4x, k4v = vel + h * k3v, acceleration(pos + h * k3x, vel + h * k3v)
    pos_next = pos + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    vel_next = vel + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return pos_next, vel_next


def integrate(initial: PlanarState | CurvedState, spec: ProblemSpec, t_max: float, dt: float) -> Trajectory:
    """Integrate with fixed RK4 steps of at most dt, landing exactly on t_max.

    A collision stops the run; the trajectory then ends at the last good
    sample and carries the error message.
    """
    if not dt > 0:
        raise UsageError(f"dt must be positive, got {dt}")
    if not t_max >= 0:
        raise UsageError(f"t_max must be nonnegative, got {t_max}")

    masses = np.asarray(initial.masses, dtype=float)
    if isinstance(initial, PlanarState):
        geometry = Geometry.PLANAR

        def acceleration(pos: FloatArray, vel: FloatArray) -> FloatArray:
            return planar_accelerations(pos, masses, spec.kernel)

    else:
        geometry = Geometry.CURVED

        def acceleration(pos: FloatArray, vel: FloatArray) -> FloatArray:
            return curved_field(pos, vel, masses)

    steps = math.ceil(t_max / dt - 1e-9) if t_max > 0 else 0
    h = t_max / steps if steps else dt
    pos_samples = np.empty((steps + 1, *initial.positions.shape))
    vel_samples = np.empty_like(pos_samples)
    pos_samples[0], vel_samples[0] = initial.positions, initial.velocities
    times = h * np.arange(steps + 1)
    if steps:
        times[-1] = t_max

    error = None
    truncated_at = None
    last = steps
    for k in range(steps):
        start = pos_samples[k]

        def guarded(pos: FloatArray, vel: FloatArray, start: FloatArray = start) -> FloatArray:
            check_separation(start, pos)
            return acceleration(pos, vel)

        try:
            pos_samples[k + 1], vel_samples[k + 1] = _rk4_step(guarded, start, vel_samples[k], h)
            check_separation(start, pos_samples[k + 1])
        except DomainError as exc:
            error, truncated_at, last = str(exc), float(times[k]), k
            log.warning("integration_truncated", t=truncated_at, error=error)
            break

    pos_samples, vel_samples, times = pos_samples[: last + 1], vel_samples[: last + 1], times[: last + 1]

    trajectory = Trajectory(
        geometry=geometry,
        times=times,
        positions=pos_samples,
        velocities=vel_samples,
        masses=masses.tolist(),
        truncated_at=truncated_at,
        error=error,
    )
    if geometry == Geometry.PLANAR:
        total = masses.sum()
        com = np.einsum("i,tik->tk", masses, pos_samples) / total
        momentum = masses @ vel_samples[0] / total
        drift = com - com[0] - times[:, None] * momentum[None, :]
        trajectory.com_drift = np.linalg.norm(drift, axis=1)
    else:
        trajectory.constraint_drift = np.max(np.abs(minkowski(pos_samples, pos_samples) + 1.0), axis=1)
        trajectory.tangency_drift = np.max(np.abs(minkowski(pos_samples, vel_samples)), axis=1)

    log.debug("integration_complete", geometry=geometry.value, steps=last, t_max=t_max, truncated=error is not None)
    return trajectory


def _planar_orbit(config: CircularConfig, spec: ProblemSpec) -> tuple[PlanarState, Callable[[FloatArray], FloatArray]]:
    """Initial state and analytic positions T(At)(Q_i - Q_M) + Q_M, central body included last."""
    q = circle_positions(config)
    masses = list(config.masses.m)
    if spec.variant == Variant.CENTRAL_MASS:
        if config.masses.central is None:
            raise UsageError("central_mass orbit needs a central mass")
        q = np.vstack((q, np.zeros(2)))
        masses.append(config.masses.central)
    weights = np.asarray(masses)
    center = weights @ q / weights.sum()
    offset = q - center
    spin = spec.spin
    velocities = spin * np.column_stack((-offset[:, 1], offset[:, 0]))

    def analytic(times: FloatArray) -> FloatArray:
        cos, sin = np.cos(spin * times)[:, None], np.sin(spin * times)[:, None]
        x = cos * offset[None, :, 0] - sin * offset[None, :, 1]
        y = sin * offset[None, :, 0] + cos * offset[None, :, 1]
        return np.stack((x, y), axis=-1) + center

    return PlanarState(positions=q, velocities=velocities, masses=masses), analytic


def trace_orbit(
    config: CircularConfig,
    spec: ProblemSpec,
    periods: float = 1.0,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> tuple[Trajectory, OrbitCheck]:
    """Integrate from the rigid-rotation initial condition and compare with the analytic orbit."""
    if steps_per_period < 1:
        raise UsageError(f"steps_per_period must be positive, got {steps_per_period}")
    period = TWO_PI / spec.spin
    dt = period / steps_per_period
    t_max = periods * period

    if spec.variant == Variant.CURVED:
        polygon = lift(config, spec.spin)
        pos0, vel0 = rigid_state(polygon)
        initial: PlanarState | CurvedState = CurvedState(positions=pos0, velocities=vel0, masses=config.masses.m)

        def analytic(times: FloatArray) -> FloatArray:
            return np.stack([rigid_state(polygon, float(t))[0] for t in times])

    else:
        initial, analytic = _planar_orbit(config, spec)

    trajectory = integrate(initial, spec, t_max, dt)
    deviation = np.max(np.linalg.norm(trajectory.positions - analytic(trajectory.times), axis=-1), axis=1)
    trajectory.rigid_deviation = deviation

    check = OrbitCheck(
        residual=float(np.max(deviation)),
        periods=periods,
        dt=float(trajectory.times[1] - trajectory.times[0]) if len(trajectory.times) > 1 else dt,
        steps=len(trajectory.times) - 1,
        truncated_at=trajectory.truncated_at,
        error=trajectory.error,
    )
    if trajectory.com_drift is not None:
        check.max_com_drift = float(np.max(trajectory.com_drift))
    if trajectory.constraint_drift is not None and trajectory.tangency_drift is not None:
        check.max_constraint_drift = float(np.max(trajectory.constraint_drift))
        check.max_tangency_drift = float(np.max(trajectory.tangency_drift))
        check.max_height_drift = float(np.max(np.abs(trajectory.positions[:, :, 2] - trajectory.positions[0, :, 2])))

    log.info(
        "orbit_checked",
        variant=spec.variant.value,
        residual=check.residual,
        steps=check.steps,
        truncated=trajectory.truncated,
    )
    return trajectory, check


def orbit_residual(
    config: CircularConfig,
    spec: ProblemSpec,
    periods: float = 1.0,
    steps_per_period: int = DEFAULT_STEPS_PER_PERIOD,
) -> float:
    """Max distance over time and bodies between the integrated and the rigidly rotating orbit."""
    _, check = trace_orbit(config, spec, periods, steps_per_period)
    return check.residual


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """One row per sample: t, then x_i, y_i[, z_i], vx_i, vy_i[, vz_i] per body (1-based)."""
    axes = "xyz"[: trajectory.dimension]
    columns: dict[str, FloatArray] = {"t": trajectory.times}
    for i in range(trajectory.positions.shape[1]):
        for k, axis in enumerate(axes):
            columns[f"{axis}_{i + 1}"] = trajectory.positions[:, i, k]
        for k, axis in enumerate(axes):
            columns[f"v{axis}_{i + 1}"] = trajectory.velocities[:, i, k]
    return pd.DataFrame(columns)


def write_trajectory_csv(trajectory: Trajectory, path: Path | str) -> Path:
    """Write the trajectory with 17 significant digits."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(trajectory).to_csv(out, index=False, float_format="%.17g")
    log.info("trajectory_written", path=str(out), samples=len(trajectory.times))
    return out
