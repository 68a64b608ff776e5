"""Force factors f, moments g = x f, their derivatives and antiderivatives.

Every family is defined by three plain functions of a positive length array:
the force factor f, the derivative g' of g(x) = x f(x), and a closed-form
antiderivative G with G' = g. All eval_* accept a float or a numpy array
and return the same shape.
"""

from collections.abc import Callable

import numpy as np
import numpy.typing as npt
import structlog
from scipy import integrate

from cocircular.errors import DomainError, NumericError
from cocircular.models import AntiderivativeMode, InteractionKernel, KernelFamily

log = structlog.get_logger()

QUAD_TOLERANCE = 1e-12

FloatArray = npt.NDArray[np.float64]
Lengths = float | FloatArray


def _power(x: FloatArray, a: float) -> FloatArray:
    return np.power(x, -a)


def _power_moment_prime(x: FloatArray, a: float) -> FloatArray:
    return (1.0 - a) * np.power(x, -a)


def _power_antiderivative(x: FloatArray, a: float) -> FloatArray:
    if a == 2.0:
        return np.log(x)
    return np.power(x, 2.0 - a) / (2.0 - a)


def _curved_f(x: FloatArray) -> FloatArray:
    return 8.0 * np.power(x, -3.0) * np.power(4.0 + x * x, -1.5)


def _curved_g_prime(x: FloatArray) -> FloatArray:
    return -8.0 * np.power(x, -3.0) * np.power(4.0 + x * x, -2.5) * (8.0 + 5.0 * x * x)


def _curved_antiderivative(x: FloatArray) -> FloatArray:
    root = np.sqrt(4.0 + x * x)
    return -0.5 * (root / x + x / root)


def _family_functions(
    kernel: InteractionKernel,
) -> tuple[Callable[[FloatArray], FloatArray], Callable[[FloatArray], FloatArray], Callable[[FloatArray], FloatArray]]:
    """(f, g', G) for the kernel's family."""
    if kernel.family == KernelFamily.POWER_LAW:
        a = float(kernel.a)  # type: ignore[arg-type]
        return (
            lambda x: _power(x, a),
            lambda x: _power_moment_prime(x, a),
            lambda x: _power_antiderivative(x, a),
        )
    if kernel.family == KernelFamily.QUASI_HOMOGENEOUS:
        c1, a, c2, b = (float(v) for v in (kernel.c1, kernel.a, kernel.c2, kernel.b))  # type: ignore[arg-type]
        return (
            lambda x: c1 * _power(x, a) + c2 * _power(x, b),
            lambda x: c1 * _power_moment_prime(x, a) + c2 * _power_moment_prime(x, b),
            lambda x: c1 * _power_antiderivative(x, a) + c2 * _power_antiderivative(x, b),
        )
    return _curved_f, _curved_g_prime, _curved_antiderivative


def _lengths(x: Lengths) -> FloatArray:
    arr = np.asarray(x, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"kernel evaluated at nonpositive length {np.min(arr) if arr.size else x}")
    return arr


def _shaped(values: FloatArray, x: Lengths) -> Lengths:
    return float(values) if np.ndim(x) == 0 else values


def eval_f(kernel: InteractionKernel, x: Lengths) -> Lengths:
    """Force factor f(x); h(x) for the curved kernel."""
    arr = _lengths(x)
    f, _, _ = _family_functions(kernel)
    with np.errstate(over="ignore"):
        return _shaped(f(arr), x)


def eval_g(kernel: InteractionKernel, x: Lengths) -> Lengths:
    """Force moment g(x) = x f(x)."""
    arr = _lengths(x)
    f, _, _ = _family_functions(kernel)
    with np.errstate(over="ignore"):
        return _shaped(arr * f(arr), x)


def eval_g_prime(kernel: InteractionKernel, x: Lengths) -> Lengths:
    arr = _lengths(x)
    _, g_prime, _ = _family_functions(kernel)
    with np.errstate(over="ignore"):
        return _shaped(g_prime(arr), x)


def _quadrature_antiderivative(kernel: InteractionKernel, x: float) -> float:
    def moment(t: float) -> float:
        return float(eval_g(kernel, t))

    result = integrate.quad(
        moment, kernel.G_ref, x, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE, limit=500, full_output=1
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > QUAD_TOLERANCE * max(1.0, abs(value)):
        log.warning("quadrature_failed", x=x, G_ref=kernel.G_ref, abserr=abserr, message=result[3])
        raise NumericError(f"quadrature of g from {kernel.G_ref} to {x} did not reach {QUAD_TOLERANCE:g}: {abserr:.3g}")
    return float(value)


def eval_G(kernel: InteractionKernel, x: Lengths) -> Lengths:  # noqa: N802
    """Antiderivative of g; closed form, or quadrature pinned by G(G_ref) = 0."""
    arr = _lengths(x)
    if kernel.antiderivative == AntiderivativeMode.QUADRATURE:
        values = np.array([_quadrature_antiderivative(kernel, float(v)) for v in arr.ravel()]).reshape(arr.shape)
        return _shaped(values, x)
    _, _, antiderivative = _family_functions(kernel)
    return _shaped(antiderivative(arr), x)
