"""Reduced potential V (and the central-mass variant W) with closed-form derivatives.

Coordinates are y = (r, a_1, ..., a_n). For a pair (i, j) write d = a_i - a_j,
s = sin(|d|/2), c = cos(|d|/2) and x = 2 r s (the chord). Then

    V  = sum_{i != j} m_i m_j G(x) - M A^2 r^2
    W  = V + 2 m_c M G(r)                      (M sums the circle masses only)

and the stationarity residuals satisfy dV/dr = -2 sum_i radial_i and
dV/da_i = 2 tangential_i.
"""

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from cocircular.configuration import cyclic_gaps
from cocircular.errors import DomainError, UsageError
from cocircular.kernels import eval_G, eval_g, eval_g_prime
from cocircular.models import (
    MIN_ANGULAR_GAP,
    TWO_PI,
    CircularConfig,
    HessianMatrix,
    HessianProbe,
    MassVector,
    ProblemSpec,
    Variant,
)

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

# Residuals below this (relative to the radial scale m_i A^2 r) count as a relative equilibrium
RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class _PairTerms:
    s: FloatArray
    c: FloatArray
    sign: FloatArray
    x: FloatArray
    mm: FloatArray
    g: FloatArray
    off: npt.NDArray[np.bool_]


class ReducedPotential:
    """V or W for fixed kernel, spin and circle masses (in body order)."""

    def __init__(self, spec: ProblemSpec, masses: MassVector | None = None) -> None:
        masses = masses or spec.masses
        if spec.variant == Variant.CENTRAL_MASS and masses.central is None:
            raise UsageError("central_mass variant requires a central mass")
        if spec.variant != Variant.CENTRAL_MASS and masses.central is not None:
            raise UsageError(f"{spec.variant.value} variant takes no central mass")

        self.kernel = spec.kernel
        self.spin_sq = spec.spin**2
        self.m = masses.values
        self.total = float(self.m.sum())
        self.central = masses.central
        self.n = masses.n

    def _pairs(self, r: float, alpha: FloatArray) -> _PairTerms:
        if not r > 0:
            raise DomainError(f"radius must be positive, got {r}")
        if alpha.shape != (self.n,):
            raise UsageError(f"expected {self.n} angles, got shape {alpha.shape}")
        if cyclic_gaps(np.sort(np.mod(alpha, TWO_PI))).min() < MIN_ANGULAR_GAP:
            raise DomainError("angular gap below collision threshold")

        diff = alpha[:, None] - alpha[None, :]
        half = 0.5 * np.abs(diff)
        s = np.sin(half)
        x = 2.0 * r * s
        off = ~np.eye(self.n, dtype=bool)
        g = np.zeros_like(x)
        g[off] = eval_g(self.kernel, x[off])
        mm = np.outer(self.m, self.m)
        mm[~off] = 0.0
        return _PairTerms(s=s, c=np.cos(half), sign=np.sign(diff), x=x, mm=mm, g=g, off=off)

    def value(self, r: float, alpha: FloatArray) -> float:
        p = self._pairs(r, alpha)
        G = np.zeros_like(p.x)  # noqa: N806
        G[p.off] = eval_G(self.kernel, p.x[p.off])
        v = float(np.sum(p.mm * G)) - self.total * self.spin_sq * r**2
        if self.central is not None:
            v += 2.0 * self.central * self.total * float(eval_G(self.kernel, r))
        return v

    def gradient(self, r: float, alpha: FloatArray) -> FloatArray:
        p = self._pairs(r, alpha)
        d_r = float(np.sum(2.0 * p.mm * p.s * p.g)) - 2.0 * self.total * self.spin_sq * r
        if self.central is not None:
            d_r += 2.0 * self.central * self.total * float(eval_g(self.kernel, r))
        d_alpha = np.sum(2.0 * p.mm * r * p.sign * p.c * p.g, axis=1)
        return np.concatenate(([d_r], d_alpha))

    def hessian(self, r: float, alpha: FloatArray) -> HessianMatrix:
        p = self._pairs(r, alpha)
        g_prime = np.zeros_like(p.x)
        g_prime[p.off] = eval_g_prime(self.kernel, p.x[p.off])

        h_rr = float(np.sum(4.0 * p.mm * p.s**2 * g_prime)) - 2.0 * self.total * self.spin_sq
        if self.central is not None:
            h_rr += 2.0 * self.central * self.total * float(eval_g_prime(self.kernel, r))
        h_ra = np.sum(2.0 * p.mm * p.sign * p.c * (p.g + p.x * g_prime), axis=1)
        h_aa = p.mm * r * p.s * p.g - 2.0 * p.mm * r**2 * p.c**2 * g_prime
        h_aa[~p.off] = 0.0
        h_aa[np.diag_indices(self.n)] = -h_aa.sum(axis=1)

        hessian = np.empty((self.n + 1, self.n + 1))
        hessian[0, 0] = h_rr
        hessian[0, 1:] = h_ra
        hessian[1:, 0] = h_ra
        hessian[1:, 1:] = h_aa
        return hessian

    def residuals(self, r: float, alpha: FloatArray) -> tuple[FloatArray, FloatArray]:
        p = self._pairs(r, alpha)
        radial = self.m * self.spin_sq * r - np.sum(p.mm * p.s * p.g, axis=1)
        if self.central is not None:
            radial -= self.m * self.central * float(eval_g(self.kernel, r))
        tangential = np.sum(p.mm * r * p.sign * p.c * p.g, axis=1)
        return radial, tangential

    def inward_pull(self, r: float, alpha: FloatArray) -> float:
        """Total inward force on the circle masses, so dV/dr = 2 (pull - M A^2 r)."""
        p = self._pairs(r, alpha)
        pull = float(np.sum(p.mm * p.s * p.g))
        if self.central is not None:
            pull += self.central * self.total * float(eval_g(self.kernel, r))
        return pull

    def residual_scale(self, r: float) -> float:
        return float(np.max(self.m)) * self.spin_sq * r

    def feasibility_margin(self, r: float) -> float:
        if self.central is None:
            raise UsageError("feasibility margin is defined for the central_mass variant only")
        return self.spin_sq * r - self.central * float(eval_g(self.kernel, r))


def _potential_for(spec: ProblemSpec, config: CircularConfig) -> ReducedPotential:
    return ReducedPotential(spec, config.masses)


def potential(spec: ProblemSpec, config: CircularConfig) -> float:
    """V, or W for the central_mass variant."""
    return _potential_for(spec, config).value(config.r, config.angles)


def gradient(spec: ProblemSpec, config: CircularConfig) -> FloatArray:
    """(dV/dr, dV/da_1, ..., dV/da_n)."""
    return _potential_for(spec, config).gradient(config.r, config.angles)


def hessian(spec: ProblemSpec, config: CircularConfig) -> HessianMatrix:
    """Symmetric (n+1) x (n+1) matrix of second partials over (r, a_1..a_n)."""
    return _potential_for(spec, config).hessian(config.r, config.angles)


def quadratic_form(spec: ProblemSpec, config: CircularConfig, probe: HessianProbe) -> float:
    vector = probe.as_vector()
    if vector.size != config.n + 1:
        raise UsageError(f"probe has {len(probe.gamma)} angular entries for {config.n} bodies")
    return float(vector @ hessian(spec, config) @ vector)


def residuals(spec: ProblemSpec, config: CircularConfig) -> tuple[FloatArray, FloatArray]:
    """(radial, tangential) residuals of the stationarity system, one entry per body."""
    return _potential_for(spec, config).residuals(config.r, config.angles)


def residual_norm(spec: ProblemSpec, config: CircularConfig) -> float:
    radial, tangential = residuals(spec, config)
    return float(max(np.max(np.abs(radial)), np.max(np.abs(tangential))))


def is_relative_equilibrium(spec: ProblemSpec, config: CircularConfig) -> bool:
    """True when both residual vectors vanish, i.e. the circle rotates rigidly under the dynamics."""
    scale = _potential_for(spec, config).residual_scale(config.r)
    return residual_norm(spec, config) <= RESIDUAL_TOLERANCE * max(1.0, scale)


def balancing_spin(spec: ProblemSpec, config: CircularConfig) -> float:
    """Spin at which dV/dr (or dW/dr) vanishes for the given configuration.

    For symmetric configurations this is the spin of the relative
    equilibrium, e.g. B = sqrt(2 h(2)) for two equal curved bodies at rho = 1.
    """
    potential = _potential_for(spec, config)
    pull = potential.inward_pull(config.r, config.angles)
    return float(np.sqrt(pull / (potential.total * config.r)))


def feasibility_margin(spec: ProblemSpec, config: CircularConfig) -> float:
    """A^2 r - m_c g(r); must be positive at a central-mass relative equilibrium."""
    if spec.variant != Variant.CENTRAL_MASS:
        raise UsageError(f"feasibility margin undefined for the {spec.variant.value} variant")
    return _potential_for(spec, config).feasibility_margin(config.r)
