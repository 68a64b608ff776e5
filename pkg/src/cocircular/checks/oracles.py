"""Finite-difference and gauge checks for the reduced potential and its kernel."""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
import structlog

from cocircular.kernels import check_admissible, eval_G, eval_g, eval_g_prime
from cocircular.models import CheckResult, CheckStatus, CircularConfig, InteractionKernel, ProblemSpec
from cocircular.variational import ReducedPotential

log = structlog.get_logger()

FloatArray = npt.NDArray[np.float64]

FD_RELATIVE_STEP = 1e-6
GRADIENT_TOLERANCE = 1e-6
HESSIAN_TOLERANCE = 1e-5
SYMMETRY_TOLERANCE = 1e-10
ROTATION_TOLERANCE = 1e-9
KERNEL_SAMPLES = 100
ROUNDING_ULPS = 16


def central_difference(
    func: Callable[[FloatArray], float | FloatArray], y: FloatArray, rel_step: float = FD_RELATIVE_STEP
) -> FloatArray:
    """Central differences with h_k = rel_step * max(1, |y_k|); column k is d func / d y_k."""
    columns = []
    for k in range(y.size):
        h = rel_step * max(1.0, abs(float(y[k])))
        plus, minus = y.copy(), y.copy()
        plus[k] += h
        minus[k] -= h
        columns.append((np.asarray(func(plus)) - np.asarray(func(minus))) / (2.0 * h))
    return np.stack(columns, axis=-1)


def relative_error(approx: FloatArray, exact: FloatArray) -> float:
    """max |approx - exact| scaled by max(1, max |exact|)."""
    return float(np.max(np.abs(approx - exact)) / max(1.0, float(np.max(np.abs(exact)))))


def _graded(check_name: str, value: float, threshold: float, what: str) -> CheckResult:
    if value <= threshold:
        status = CheckStatus.PASS
        message = f"{what} agrees to {value:.2e} (threshold: {threshold:g})"
    elif value <= 100 * threshold:
        status = CheckStatus.WARN
        message = f"{what} off by {value:.2e}, within 100x threshold {threshold:g}"
    else:
        status = CheckStatus.FAIL
        message = f"{what} off by {value:.2e} (threshold: {threshold:g})"
    return CheckResult(check_name=check_name, status=status, metric_value=value, threshold=threshold, message=message)


class DerivativeChecker:
    """Runs derivative and gauge checks on a reduced potential or a kernel."""

    def check_potential(self, spec: ProblemSpec, config: CircularConfig) -> list[CheckResult]:
        """Gradient and Hessian against finite differences, Hessian symmetry and the rotation null vector."""
        potential = ReducedPotential(spec, config.masses)
        y = np.concatenate(([config.r], config.angles))

        def value(v: FloatArray) -> float:
            return potential.value(float(v[0]), v[1:])

        def gradient(v: FloatArray) -> FloatArray:
            return potential.gradient(float(v[0]), v[1:])

        exact_gradient = gradient(y)
        exact_hessian = potential.hessian(config.r, config.angles)

        results = [
            self._check_gradient(central_difference(value, y), exact_gradient),
            self._check_hessian(central_difference(gradient, y), exact_hessian),
            self._check_symmetry(exact_hessian),
            self._check_rotation_gauge(exact_hessian),
        ]
        passed = sum(1 for r in results if r.status == CheckStatus.PASS)
        log.info("potential_checks_complete", passed=passed, total=len(results))
        return results

    def check_kernel(self, kernel: InteractionKernel) -> list[CheckResult]:
        """Admissibility plus g' and G against central differences of g and G on a log grid."""
        grid = np.geomspace(kernel.domain_lo, kernel.domain_hi, KERNEL_SAMPLES)
        results = [
            self._check_admissibility(kernel),
            self._check_kernel_derivative(
                "g_prime_oracle", lambda x: np.asarray(eval_g(kernel, x)), np.asarray(eval_g_prime(kernel, grid)), grid
            ),
            self._check_kernel_derivative(
                "antiderivative_oracle", lambda x: np.asarray(eval_G(kernel, x)), np.asarray(eval_g(kernel, grid)), grid
            ),
        ]
        passed = sum(1 for r in results if r.status == CheckStatus.PASS)
        log.info("kernel_checks_complete", family=kernel.family.value, passed=passed, total=len(results))
        return results

    def _check_gradient(self, fd: FloatArray, exact: FloatArray) -> CheckResult:
        error = relative_error(fd, exact)
        return _graded("gradient_oracle", error, GRADIENT_TOLERANCE, "gradient vs central differences")

    def _check_hessian(self, fd: FloatArray, exact: FloatArray) -> CheckResult:
        error = relative_error(fd, exact)
        return _graded("hessian_oracle", error, HESSIAN_TOLERANCE, "Hessian vs differenced gradient")

    def _check_symmetry(self, hessian: FloatArray) -> CheckResult:
        asymmetry = float(np.max(np.abs(hessian - hessian.T)) / max(1.0, float(np.max(np.abs(hessian)))))
        return _graded("hessian_symmetry", asymmetry, SYMMETRY_TOLERANCE, "H vs H^T")

    def _check_rotation_gauge(self, hessian: FloatArray) -> CheckResult:
        rotation = np.ones(hessian.shape[0])
        rotation[0] = 0.0
        leak = float(np.linalg.norm(hessian @ rotation) / max(np.linalg.norm(hessian, 2), np.finfo(float).tiny))
        return _graded("rotation_gauge", leak, ROTATION_TOLERANCE, "H (0,1,...,1)")

    def _check_admissibility(self, kernel: InteractionKernel) -> CheckResult:
        verdict = check_admissible(kernel)
        if verdict.admissible:
            return CheckResult(
                check_name="admissibility",
                status=CheckStatus.PASS,
                metric_value=verdict.samples,
                message=f"f > 0 and g' < 0 at all {verdict.samples} samples",
            )
        return CheckResult(
            check_name="admissibility",
            status=CheckStatus.FAIL,
            metric_value=verdict.first_violation,
            message=f"kernel inadmissible: {verdict.reason} at x={verdict.first_violation:.6g}",
        )

    def _check_kernel_derivative(
        self,
        check_name: str,
        func: Callable[[FloatArray], FloatArray],
        exact: FloatArray,
        grid: FloatArray,
    ) -> CheckResult:
        h = FD_RELATIVE_STEP * grid
        upper, lower = func(grid + h), func(grid - h)
        fd = (upper - lower) / (2.0 * h)
        # differences of a nearly constant antiderivative are pure rounding; only the excess counts
        floor = ROUNDING_ULPS * np.finfo(float).eps * np.maximum(np.abs(upper), np.abs(lower)) / h
        error = float(np.max(np.maximum(np.abs(fd - exact) - floor, 0.0) / np.abs(exact)))
        return _graded(check_name, error, GRADIENT_TOLERANCE, "derivative vs central differences")
