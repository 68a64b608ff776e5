"""Multi-start uniqueness experiments for one cyclic mass ordering."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog
from scipy.cluster import hierarchy

from cocircular.configuration import class_distance, ordered_masses
from cocircular.models import (
    TWO_PI,
    CircularConfig,
    OrderingId,
    ProblemSpec,
    SolveOptions,
    StartOutcome,
    StationaryReport,
    UniquenessReport,
    UniquenessVerdict,
)
from cocircular.solver.stationary import StationarySolver, default_start

log = structlog.get_logger()

# Angle jitter never exceeds this fraction of the regular spacing, so the ordering survives
JITTER_SPACING_FRACTION = 0.45
_FAR = 1e300


def start_config(base: CircularConfig, start: int, options: SolveOptions) -> CircularConfig:
    """Jittered copy of the base polygon; the stream depends only on (seed, start)."""
    rng = np.random.default_rng([options.seed, start])
    n = base.n
    cap = min(options.perturb_angle, JITTER_SPACING_FRACTION * TWO_PI / n)
    alpha = base.angles + rng.uniform(-cap, cap, n)
    alpha -= alpha[0]
    r = base.r * (1.0 + rng.uniform(-options.perturb_radius, options.perturb_radius))
    return CircularConfig(r=r, alpha=alpha.tolist(), masses=base.masses)


def cluster_classes(configs: list[CircularConfig], tol: float) -> list[int]:
    """Complete-linkage clusters at distance tol; labels numbered by first appearance."""
    if not configs:
        return []
    if len(configs) == 1:
        return [0]

    condensed = np.array(
        [class_distance(configs[i], configs[j]) for i in range(len(configs)) for j in range(i + 1, len(configs))]
    )
    tree = hierarchy.linkage(np.minimum(condensed, _FAR), method="complete")
    raw = hierarchy.fcluster(tree, t=tol, criterion="distance")

    relabel: dict[int, int] = {}
    return [relabel.setdefault(int(label), len(relabel)) for label in raw]


def uniqueness_experiment(
    spec: ProblemSpec, ordering: OrderingId, opts: SolveOptions | None = None
) -> UniquenessReport:
    """Solve from `starts` jittered polygons in the given ordering and count distinct classes."""
    options = opts or SolveOptions()
    masses = ordered_masses(spec.masses, ordering)
    solver = StationarySolver(spec, options)
    base = default_start(spec, masses)

    def run(start: int) -> StationaryReport:
        return solver.solve(start_config(base, start, options))

    if options.workers > 1:
        with ThreadPoolExecutor(max_workers=options.workers) as pool:
            reports = list(pool.map(run, range(options.starts)))
    else:
        reports = [run(start) for start in range(options.starts)]

    converged = [k for k, report in enumerate(reports) if report.converged]
    labels = cluster_classes([reports[k].config for k in converged], options.tol_class)
    class_of = dict(zip(converged, labels, strict=True))

    classes: list[CircularConfig] = []
    for k, label in zip(converged, labels, strict=True):
        if label == len(classes):
            classes.append(reports[k].config)

    per_start = [
        StartOutcome(
            start=k,
            converged=report.converged,
            status=report.status,
            grad_norm=report.grad_norm,
            iterations=report.iterations,
            is_local_max=report.is_local_max,
            class_index=class_of.get(k),
        )
        for k, report in enumerate(reports)
    ]

    if not classes:
        verdict = UniquenessVerdict.NONE_FOUND
    elif len(classes) == 1:
        verdict = UniquenessVerdict.UNIQUE
    else:
        verdict = UniquenessVerdict.MULTIPLE

    log.info(
        "uniqueness_experiment_complete",
        ordering=ordering.label,
        verdict=verdict.value,
        classes=len(classes),
        converged=len(converged),
        starts=options.starts,
    )
    return UniquenessReport(
        ordering=ordering,
        classes=classes,
        per_start=per_start,
        verdict=verdict,
        single_start=options.starts == 1,
        seed=options.seed,
    )
