"""Exact trust-region subproblem for ascent, plus the fraction-to-boundary rule."""

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg, optimize

FloatArray = npt.NDArray[np.float64]

# Keep this fraction of the distance to a gap or radius bound
BOUNDARY_FRACTION = 0.995

ETA_ACCEPT = 0.1
ETA_SHRINK = 0.25
ETA_EXPAND = 0.75


@dataclass(frozen=True)
class TrustRegionStep:
    step: FloatArray
    predicted: float
    on_boundary: bool


def _model_increase(gradient: FloatArray, hessian: FloatArray, step: FloatArray) -> float:
    return float(gradient @ step + 0.5 * step @ hessian @ step)


def solve_subproblem(gradient: FloatArray, hessian: FloatArray, radius: float) -> TrustRegionStep:
    """Maximise g.p + p.H.p / 2 subject to |p| <= radius.

    Works on B = -H: p(lam) = (B + lam I)^-1 g with lam >= max(0, -lambda_min(B)),
    either lam = 0 inside the region or |p(lam)| = radius found by brentq. The
    hard case (g orthogonal to the lowest eigenvector) is completed along that
    eigenvector.
    """
    eigenvalues, eigenvectors = linalg.eigh(-hessian)
    coefficients = eigenvectors.T @ gradient
    lowest = float(eigenvalues[0])

    def step_for(lam: float) -> FloatArray:
        return eigenvectors @ (coefficients / (eigenvalues + lam))

    if lowest > 0:
        newton = step_for(0.0)
        if np.linalg.norm(newton) <= radius:
            return TrustRegionStep(newton, _model_increase(gradient, hessian, newton), on_boundary=False)

    lam_lo = max(0.0, -lowest)
    lam_hi = lam_lo + float(np.linalg.norm(gradient)) / radius

    def excess(lam: float) -> float:
        return float(np.linalg.norm(step_for(lam))) - radius

    eps = 1e-14 * max(1.0, abs(lam_lo), float(np.max(np.abs(eigenvalues))))
    start = lam_lo + eps
    with np.errstate(divide="ignore", invalid="ignore"):
        start_excess = excess(start)
    if not math.isfinite(start_excess) or start_excess > 0:
        if excess(lam_hi) >= 0:
            lam = lam_hi
        else:
            lam = optimize.brentq(excess, start, lam_hi, xtol=1e-15, rtol=1e-12, maxiter=200)
        step = step_for(lam)
    else:
        # hard case: the shifted step is short; top up along the lowest eigenvector
        step = step_for(start)
        direction = eigenvectors[:, 0]
        slack = radius**2 - float(step @ step)
        along = float(step @ direction)
        tau = -along + math.sqrt(along**2 + max(slack, 0.0))
        step = step + tau * direction

    return TrustRegionStep(step, _model_increase(gradient, hessian, step), on_boundary=True)


def fraction_to_boundary(
    gaps: FloatArray,
    gap_change: FloatArray,
    radius: float,
    radius_change: float,
    min_gap: float,
    min_radius: float,
) -> float:
    """Largest tau in (0, 1] keeping every gap >= min_gap and r >= min_radius, shortened by BOUNDARY_FRACTION."""
    tau = 1.0
    shrinking = gap_change < 0
    if np.any(shrinking):
        limits = (gaps[shrinking] - min_gap) / -gap_change[shrinking]
        tau = min(tau, BOUNDARY_FRACTION * float(np.min(limits)))
    if radius_change < 0:
        tau = min(tau, BOUNDARY_FRACTION * (radius - min_radius) / -radius_change)
    return max(tau, 0.0)
