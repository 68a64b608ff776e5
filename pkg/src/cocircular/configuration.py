"""Co-circular configurations: coordinates, canonical forms and mass orderings."""

import itertools
import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt
import structlog

from cocircular.errors import DomainError, UsageError
from cocircular.models import TWO_PI, CircularConfig, MassVector, OrderingId

log = structlog.get_logger()


def _check_index(config: CircularConfig, i: int) -> None:
    if not 1 <= i <= config.n:
        raise IndexError(f"body index {i} outside 1..{config.n}")


def _wrap(angles: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    wrapped = np.mod(angles, TWO_PI)
    wrapped[wrapped >= TWO_PI] = 0.0
    return wrapped


def cartesian(config: CircularConfig, i: int) -> npt.NDArray[np.float64]:
    """Q_i = r (cos a_i, sin a_i), 1-based."""
    _check_index(config, i)
    angle = config.alpha[i - 1]
    return np.array([config.r * math.cos(angle), config.r * math.sin(angle)])


def positions(config: CircularConfig) -> npt.NDArray[np.float64]:
    """All circle positions as an (n, 2) array."""
    angles = config.angles
    return config.r * np.column_stack((np.cos(angles), np.sin(angles)))


def chord(config: CircularConfig, i: int, j: int) -> float:
    """|Q_i - Q_j| = 2 r sin(|a_i - a_j| / 2)."""
    _check_index(config, i)
    _check_index(config, j)
    if i == j:
        raise DomainError(f"chord of body {i} with itself")
    return 2.0 * config.r * math.sin(0.5 * abs(config.alpha[i - 1] - config.alpha[j - 1]))


def center_of_mass(config: CircularConfig) -> npt.NDArray[np.float64]:
    """Q_M, counting the central mass (at the origin) when present."""
    weighted = config.masses.values @ positions(config)
    return weighted / config.masses.total


def cyclic_gaps(alpha: Sequence[float] | npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Gaps a_2 - a_1, ..., a_n - a_{n-1}, 2pi + a_1 - a_n."""
    angles = np.asarray(alpha, dtype=float)
    return np.diff(np.append(angles, angles[0] + TWO_PI))


def _relabel(config: CircularConfig, start: int, alpha: npt.NDArray[np.float64]) -> CircularConfig:
    """Config whose body 1 is the old body start+1, with the given angles."""
    m = config.masses.m
    masses = MassVector(m=m[start:] + m[:start], central=config.masses.central)
    return CircularConfig(r=config.r, alpha=alpha.tolist(), masses=masses)


def rotate(config: CircularConfig, theta: float) -> CircularConfig:
    """Rigid rotation by theta; bodies are relabelled cyclically so angles stay increasing."""
    wrapped = _wrap(config.angles + theta)
    start = int(np.argmin(wrapped))
    return _relabel(config, start, np.roll(wrapped, -start))


def anchor(config: CircularConfig) -> CircularConfig:
    """Rotate by -a_1 keeping the labels, so body 1 sits at angle 0."""
    alpha = config.angles - config.angles[0]
    return CircularConfig(r=config.r, alpha=alpha.tolist(), masses=config.masses)


def canonicalize(config: CircularConfig) -> CircularConfig:
    """Representative of the rotation class with a_1 = 0, labels kept.

    Angles are rotated by -a_1 and wrapped into [0, 2pi); r, the masses in
    body order and the gaps are unchanged. Rotations that relabel bodies
    cyclically are compared with class_distance instead.
    """
    alpha = _wrap(config.angles - config.angles[0])
    alpha[0] = 0.0
    return CircularConfig(r=config.r, alpha=alpha.tolist(), masses=config.masses)


def class_distance(a: CircularConfig, b: CircularConfig) -> float:
    """Rotation-only distance: max(|dr|, max |d alpha|) minimised over relabellings preserving masses."""
    if a.n != b.n or a.masses.central != b.masses.central:
        return math.inf
    target = anchor(b).angles
    best = math.inf
    for k in range(a.n):
        if a.masses.m[k:] + a.masses.m[:k] != b.masses.m:
            continue
        rolled = np.roll(a.angles, -k)
        alpha = np.mod(rolled - rolled[0], TWO_PI)
        alpha[0] = 0.0
        best = min(best, max(abs(a.r - b.r), float(np.max(np.abs(alpha - target)))))
    return best


def _minimal_rotation(values: tuple[float, ...]) -> tuple[float, ...]:
    return min(values[k:] + values[:k] for k in range(len(values)))


def enumerate_orderings(masses: MassVector) -> list[OrderingId]:
    """Distinct cyclic arrangements of the circle masses.

    Index permutations with 0 first cover every necklace once; arrangements
    whose mass values coincide up to rotation are kept only once.
    Reflections are distinct.
    """
    n = masses.n
    seen: set[tuple[float, ...]] = set()
    orderings = []
    for tail in itertools.permutations(range(1, n)):
        perm = (0, *tail)
        key = _minimal_rotation(tuple(masses.m[i] for i in perm))
        if key in seen:
            continue
        seen.add(key)
        orderings.append(OrderingId(perm=list(perm)))

    log.debug("orderings_enumerated", n=n, count=len(orderings))
    return orderings


def ordered_masses(masses: MassVector, ordering: OrderingId) -> MassVector:
    """Circle masses rearranged in the ordering's cyclic order."""
    if len(ordering.perm) != masses.n:
        raise UsageError(f"ordering of {len(ordering.perm)} bodies for {masses.n} masses")
    return MassVector(m=[masses.m[i] for i in ordering.perm], central=masses.central)


def regular_ngon(n: int, r: float, masses: MassVector) -> CircularConfig:
    """Equally spaced bodies, a_i = 2pi (i - 1) / n."""
    if n < 2:
        raise UsageError(f"regular polygon needs n >= 2, got {n}")
    if n != masses.n:
        raise UsageError(f"regular {n}-gon for {masses.n} masses")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    alpha = TWO_PI * np.arange(n) / n
    return CircularConfig(r=r, alpha=alpha.tolist(), masses=masses)
