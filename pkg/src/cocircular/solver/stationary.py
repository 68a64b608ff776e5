"""Gauge-fixed trust-region ascent to stationary points of V (or W) and their certification.

The unknowns are y = (r, a_2, ..., a_n) with a_1 pinned at 0, which removes
the rotation null direction. Steps are shortened so every cyclic gap stays
above min_gap and r above min_radius, so the mass ordering never changes.
"""

import math

import numpy as np
import numpy.typing as npt
import structlog
from scipy import linalg, optimize

from cocircular.configuration import anchor, canonicalize, cyclic_gaps, regular_ngon
from cocircular.errors import DomainError, UsageError
from cocircular.kernels import eval_g
from cocircular.models import (
    CircularConfig,
    LocalMaxVerdict,
    MassVector,
    ProblemSpec,
    SolveOptions,
    SolveStatus,
    StationaryReport,
)
from cocircular.solver.trust_region import (
    ETA_ACCEPT,
    ETA_EXPAND,
    ETA_SHRINK,
    fraction_to_boundary,
    solve_subproblem,
)
from cocircular.variational import RESIDUAL_TOLERANCE, ReducedPotential

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

INITIAL_TRUST_RADIUS = 0.5
MAX_TRUST_RADIUS = 10.0
MIN_TRUST_RADIUS = 1e-14

# Accepted steps may lose at most this fraction of |V| to rounding
MONOTONICITY_SLACK = 1e-12
# Predicted increases below this fraction of |V| are rounding noise
PREDICTED_NOISE = 1e-10

POLISH_STEPS = 2

NULL_EIGENVALUE_TOLERANCE = 1e-9
# The near-null eigenvector must lie within this angle (radians) of the rotation direction
NULL_DIRECTION_TOLERANCE = 1e-6
BISECTION_BRACKET = (1e-3, 1e3)


def initial_radius(spec: ProblemSpec, masses: MassVector | None = None) -> float:
    """Radius of the regular polygon balancing the mean circle mass, by bisection.

    Solves A^2 r = m_mean sum_k s_k g(2 r s_k) (+ m_c g(r)) with
    s_k = sin(pi k / n); falls back to r = 1 when the bracket holds no root.
    """
    masses = masses or spec.masses
    n = masses.n
    mean = masses.circle_total / n
    sines = np.sin(math.pi * np.arange(1, n) / n)
    spin_sq = spec.spin**2

    def balance(r: float) -> float:
        pull = mean * float(np.sum(sines * np.asarray(eval_g(spec.kernel, 2.0 * r * sines))))
        if masses.central is not None:
            pull += masses.central * float(eval_g(spec.kernel, r))
        return pull - spin_sq * r

    lo, hi = BISECTION_BRACKET
    if balance(lo) * balance(hi) > 0:
        log.warning("initial_radius_unbracketed", lo=lo, hi=hi, spin=spec.spin)
        return 1.0
    return float(optimize.bisect(balance, lo, hi, xtol=1e-14, maxiter=400))


def default_start(spec: ProblemSpec, masses: MassVector | None = None) -> CircularConfig:
    """Regular polygon at the bisection radius."""
    masses = masses or spec.masses
    return regular_ngon(masses.n, initial_radius(spec, masses), masses)


def _unpack(y: FloatArray) -> tuple[float, FloatArray]:
    return float(y[0]), np.concatenate(([0.0], y[1:]))


def _reduce(full: FloatArray) -> FloatArray:
    """Drop the a_1 coordinate from a gradient or Hessian."""
    if full.ndim == 1:
        return np.delete(full, 1)
    return np.delete(np.delete(full, 1, axis=0), 1, axis=1)


def _certificate(potential: ReducedPotential, r: float, alpha: FloatArray, tol_eig: float) -> LocalMaxVerdict:
    """Negative-definite gauge-fixed Hessian, and exactly one near-null direction: the rigid rotation."""
    hessian = potential.hessian(r, alpha)
    full_values, full_vectors = linalg.eigh(hessian)
    norm = float(np.max(np.abs(full_values)))
    spectrum = linalg.eigvalsh(_reduce(hessian))

    null_index = int(np.argmin(np.abs(full_values)))
    null_vector = full_vectors[:, null_index]
    rotation = np.concatenate(([0.0], np.ones(alpha.size))) / math.sqrt(alpha.size)
    along = abs(float(null_vector @ rotation))
    across = float(np.linalg.norm(null_vector - (null_vector @ rotation) * rotation))
    near_null_count = int(np.sum(np.abs(full_values) < NULL_EIGENVALUE_TOLERANCE * norm))
    null_direction_angle = math.atan2(across, along)

    concave = bool(spectrum[-1] < -tol_eig * norm)
    null_confirmed = near_null_count == 1 and null_direction_angle <= NULL_DIRECTION_TOLERANCE
    return LocalMaxVerdict(
        is_local_max=concave and null_confirmed,
        null_direction_confirmed=null_confirmed,
        spectrum=spectrum.tolist(),
        hessian_norm=norm,
        null_eigenvalue=float(full_values[null_index]),
        near_null_count=near_null_count,
        null_direction_angle=null_direction_angle,
    )


class StationarySolver:
    """Trust-region Newton ascent on the gauge-fixed reduced potential."""

    def __init__(self, spec: ProblemSpec, options: SolveOptions | None = None) -> None:
        self.spec = spec
        self.options = options or SolveOptions()

    def _boundary_factor(self, y: FloatArray, step: FloatArray) -> float:
        _, alpha = _unpack(y)
        _, d_alpha = _unpack(step)
        gap_change = np.diff(np.append(d_alpha, d_alpha[0]))
        return fraction_to_boundary(
            cyclic_gaps(alpha),
            gap_change,
            float(y[0]),
            float(step[0]),
            self.options.min_gap,
            self.options.min_radius,
        )

    def _polish(self, potential: ReducedPotential, y: FloatArray, grad_norm: float) -> tuple[FloatArray, float]:
        """A few plain Newton steps past tol_grad, kept only while they shrink the gradient."""
        value = potential.value(*_unpack(y))
        for _ in range(POLISH_STEPS):
            r, alpha = _unpack(y)
            reduced_grad = _reduce(potential.gradient(r, alpha))
            try:
                step = linalg.solve(_reduce(potential.hessian(r, alpha)), -reduced_grad, assume_a="sym")
            except linalg.LinAlgError:
                break
            if self._boundary_factor(y, step) < 1.0:
                break
            candidate = y + step
            try:
                new_value = potential.value(*_unpack(candidate))
                new_norm = float(np.linalg.norm(potential.gradient(*_unpack(candidate))))
            except DomainError:
                break
            if not new_norm < grad_norm or new_value < value - MONOTONICITY_SLACK * abs(value):
                break
            y, grad_norm, value = candidate, new_norm, new_value
        return y, grad_norm

    def solve(self, init: CircularConfig) -> StationaryReport:
        opts = self.options
        potential = ReducedPotential(self.spec, init.masses)
        start = anchor(init)
        if cyclic_gaps(start.alpha).min() < opts.min_gap or start.r < opts.min_radius:
            raise UsageError("initial configuration violates the gap or radius bounds")

        y = np.concatenate(([start.r], start.angles[1:]))
        value = potential.value(*_unpack(y))
        trust_radius = INITIAL_TRUST_RADIUS
        status = SolveStatus.MAX_ITER
        iterations = 0

        while True:
            r, alpha = _unpack(y)
            full_grad = potential.gradient(r, alpha)
            grad_norm = float(np.linalg.norm(full_grad))
            if grad_norm <= opts.tol_grad:
                status = SolveStatus.CONVERGED
                y, grad_norm = self._polish(potential, y, grad_norm)
                break
            if iterations >= opts.max_iter:
                break
            iterations += 1

            reduced_grad = _reduce(full_grad)
            reduced_hess = _reduce(potential.hessian(r, alpha))
            trial = solve_subproblem(reduced_grad, reduced_hess, trust_radius)
            tau = self._boundary_factor(y, trial.step)
            step = tau * trial.step
            step_norm = float(np.linalg.norm(step))
            predicted = float(reduced_grad @ step + 0.5 * step @ reduced_hess @ step)

            accepted = False
            new_value = value
            if step_norm > 0:
                try:
                    new_value = potential.value(*_unpack(y + step))
                except DomainError:
                    new_value = -math.inf
                actual = new_value - value
                noise = PREDICTED_NOISE * max(1.0, abs(value))
                accepted = actual >= -MONOTONICITY_SLACK * abs(value) and (
                    actual >= ETA_ACCEPT * predicted or predicted <= noise
                )

            log.debug(
                "ascent_step",
                iteration=iterations,
                value=value,
                grad_norm=grad_norm,
                trust_radius=trust_radius,
                tau=tau,
                accepted=accepted,
            )

            if not accepted:
                trust_radius = 0.25 * (step_norm if step_norm > 0 else trust_radius)
                if trust_radius < MIN_TRUST_RADIUS:
                    status = SolveStatus.STEP_FAILURE
                    break
                continue

            ratio = (new_value - value) / predicted if predicted > 0 else 1.0
            y, value = y + step, new_value
            if ratio > ETA_EXPAND and trial.on_boundary and tau == 1.0:
                trust_radius = min(2.0 * trust_radius, MAX_TRUST_RADIUS)
            elif ratio < ETA_SHRINK:
                trust_radius = max(0.25 * step_norm, MIN_TRUST_RADIUS)

        r, alpha = _unpack(y)
        solved = CircularConfig(r=r, alpha=alpha.tolist(), masses=init.masses)
        certificate = _certificate(potential, r, alpha, opts.tol_eig)
        radial, tangential = potential.residuals(r, alpha)
        residual_norm = float(max(np.max(np.abs(radial)), np.max(np.abs(tangential))))

        margin = None
        if init.masses.central is not None:
            margin = potential.feasibility_margin(r)

        report = StationaryReport(
            config=canonicalize(solved),
            grad_norm=grad_norm,
            hessian_spectrum=certificate.spectrum,
            is_local_max=certificate.is_local_max,
            feasibility_margin=margin,
            feasible=None if margin is None else margin > 0,
            iterations=iterations,
            converged=status == SolveStatus.CONVERGED,
            status=status,
            potential=potential.value(r, alpha),
            residual_norm=residual_norm,
            is_relative_equilibrium=residual_norm <= RESIDUAL_TOLERANCE * max(1.0, potential.residual_scale(r)),
            null_direction_angle=certificate.null_direction_angle,
        )
        log.debug(
            "stationary_solved",
            status=status.value,
            iterations=iterations,
            grad_norm=grad_norm,
            r=r,
            is_local_max=report.is_local_max,
        )
        return report

    def verify(self, config: CircularConfig) -> LocalMaxVerdict:
        """Second-order certificate; the configuration must already be stationary."""
        potential = ReducedPotential(self.spec, config.masses)
        grad_norm = float(np.linalg.norm(potential.gradient(config.r, config.angles)))
        if grad_norm > self.options.tol_grad:
            raise UsageError(f"configuration is not stationary: |grad| = {grad_norm:.3g} > {self.options.tol_grad:g}")
        return _certificate(potential, config.r, config.angles, self.options.tol_eig)


def solve_stationary(spec: ProblemSpec, init: CircularConfig, opts: SolveOptions | None = None) -> StationaryReport:
    report = StationarySolver(spec, opts).solve(init)
    log.info(
        "stationary_solve_complete",
        variant=spec.variant.value,
        status=report.status.value,
        iterations=report.iterations,
        grad_norm=report.grad_norm,
    )
    return report


def verify_local_max(spec: ProblemSpec, config: CircularConfig, opts: SolveOptions | None = None) -> LocalMaxVerdict:
    return StationarySolver(spec, opts).verify(config)
