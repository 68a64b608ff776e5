"""Sampled admissibility check: f > 0 and g strictly decreasing."""

import numpy as np
import structlog

from cocircular.errors import UsageError
from cocircular.kernels.functions import eval_f, eval_g_prime
from cocircular.models import AdmissibilityVerdict, InteractionKernel

log = structlog.get_logger()

DEFAULT_SAMPLES = 512


def check_admissible(kernel: InteractionKernel, samples: int = DEFAULT_SAMPLES) -> AdmissibilityVerdict:
    """Sample f and g' on a log-spaced grid over [domain_lo, domain_hi].

    The first violating grid point is reported; when both conditions fail
    there, "f nonpositive" wins.
    """
    if samples < 2:
        raise UsageError(f"admissibility needs at least 2 samples, got {samples}")

    grid = np.geomspace(kernel.domain_lo, kernel.domain_hi, samples)
    f = np.asarray(eval_f(kernel, grid))
    g_prime = np.asarray(eval_g_prime(kernel, grid))

    bad_f = np.flatnonzero(~(f > 0))
    bad_g = np.flatnonzero(~(g_prime < 0))

    if bad_f.size == 0 and bad_g.size == 0:
        return AdmissibilityVerdict(admissible=True, samples=samples)

    first_f = int(bad_f[0]) if bad_f.size else samples
    first_g = int(bad_g[0]) if bad_g.size else samples
    if first_f <= first_g:
        reason, index = "f nonpositive", first_f
    else:
        reason, index = "g increasing", first_g

    log.debug("kernel_inadmissible", family=kernel.family.value, reason=reason, x=float(grid[index]))
    return AdmissibilityVerdict(
        admissible=False,
        reason=reason,
        first_violation=float(grid[index]),
        samples=samples,
    )
