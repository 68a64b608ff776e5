"""Data models for co-circular relative equilibria."""

import math
from enum import Enum
from typing import Annotated, Any

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi

# Minimum cyclic angular gap between neighbouring bodies (radians)
MIN_ANGULAR_GAP = 1e-6

HessianMatrix = npt.NDArray[np.float64]

PositiveMass = Annotated[float, Field(gt=0, allow_inf_nan=False)]
FiniteFloat = Annotated[float, Field(allow_inf_nan=False)]


def _check_angles(angles: list[float], n: int) -> None:
    """Raise ValueError unless 0 <= a_1 < ... < a_n < 2pi with cyclic gaps >= MIN_ANGULAR_GAP."""
    if len(angles) != n:
        raise ValueError(f"got {len(angles)} angles for {n} masses")
    if not all(math.isfinite(a) for a in angles):
        raise ValueError("angles must be finite")
    if angles[0] < 0 or angles[-1] >= TWO_PI:
        raise ValueError("angles must lie in [0, 2pi)")
    gaps = np.diff(np.append(angles, angles[0] + TWO_PI))
    if np.any(gaps[:-1] <= 0):
        raise ValueError("angles must be strictly increasing")
    if gaps.min() < MIN_ANGULAR_GAP:
        raise ValueError(f"cyclic angular gap {gaps.min():.3g} below {MIN_ANGULAR_GAP:g} (collision)")


class KernelFamily(str, Enum):
    """Force-law family."""

    POWER_LAW = "power_law"
    QUASI_HOMOGENEOUS = "quasi_homogeneous"
    CURVED_HYPERBOLIC = "curved_hyperbolic"


class AntiderivativeMode(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


class Variant(str, Enum):
    """Which reduced potential a problem uses."""

    PLAIN = "plain"
    CENTRAL_MASS = "central_mass"
    CURVED = "curved"


class InteractionKernel(BaseModel):
    """Force factor f(x) of a pair at distance x, with g(x) = x f(x).

    power_law uses f = x^-a, quasi_homogeneous uses f = c1 x^-a + c2 x^-b and
    curved_hyperbolic is the reduced kernel h of the hyperbolic problem.
    """

    model_config = ConfigDict(extra="forbid")

    family: KernelFamily
    a: float | None = Field(default=None, allow_inf_nan=False)
    b: float | None = Field(default=None, allow_inf_nan=False)
    c1: float | None = Field(default=None, allow_inf_nan=False)
    c2: float | None = Field(default=None, allow_inf_nan=False)
    domain_lo: float = Field(default=1e-3, gt=0)
    domain_hi: float = Field(default=1e3, gt=0, allow_inf_nan=False)
    G_ref: float = Field(default=1.0, gt=0, allow_inf_nan=False)
    antiderivative: AntiderivativeMode = AntiderivativeMode.CLOSED_FORM

    @model_validator(mode="after")
    def _check_parameters(self) -> "InteractionKernel":
        if self.domain_hi <= self.domain_lo:
            raise ValueError("domain_hi must exceed domain_lo")
        if self.family == KernelFamily.POWER_LAW and self.a is None:
            raise ValueError("power_law kernel requires exponent a")
        if self.family == KernelFamily.QUASI_HOMOGENEOUS:
            missing = [name for name in ("c1", "a", "c2", "b") if getattr(self, name) is None]
            if missing:
                raise ValueError(f"quasi_homogeneous kernel requires {', '.join(missing)}")
        return self

    @classmethod
    def power_law(cls, a: float, **kwargs: Any) -> "InteractionKernel":
        return cls(family=KernelFamily.POWER_LAW, a=a, **kwargs)

    @classmethod
    def quasi_homogeneous(cls, c1: float, a: float, c2: float, b: float, **kwargs: Any) -> "InteractionKernel":
        return cls(family=KernelFamily.QUASI_HOMOGENEOUS, c1=c1, a=a, c2=c2, b=b, **kwargs)

    @classmethod
    def curved(cls, **kwargs: Any) -> "InteractionKernel":
        return cls(family=KernelFamily.CURVED_HYPERBOLIC, **kwargs)


class AdmissibilityVerdict(BaseModel):
    """Outcome of sampling a kernel for f > 0 and g' < 0."""

    admissible: bool
    reason: str | None = None
    first_violation: float | None = None
    samples: int


class MassVector(BaseModel):
    """Circle masses m_1..m_n, plus an optional mass fixed at the centre."""

    model_config = ConfigDict(extra="forbid")

    m: list[PositiveMass] = Field(min_length=2)
    central: PositiveMass | None = None

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def values(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.m, dtype=float)

    @property
    def circle_total(self) -> float:
        return math.fsum(self.m)

    @property
    def total(self) -> float:
        return self.circle_total + (self.central or 0.0)


class CircularConfig(BaseModel):
    """Bodies at Q_i = r (cos a_i, sin a_i) on one circle centred at the origin."""

    model_config = ConfigDict(extra="forbid")

    r: float = Field(gt=0, allow_inf_nan=False)
    alpha: list[float]
    masses: MassVector

    @model_validator(mode="after")
    def _check_ordering(self) -> "CircularConfig":
        _check_angles(self.alpha, self.masses.n)
        return self

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def angles(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.alpha, dtype=float)


class OrderingId(BaseModel):
    """Cyclic arrangement of mass indices, stored as its lexicographically smallest rotation."""

    perm: list[int] = Field(min_length=2)

    @model_validator(mode="after")
    def _check_representative(self) -> "OrderingId":
        n = len(self.perm)
        if sorted(self.perm) != list(range(n)):
            raise ValueError(f"perm must be a permutation of 0..{n - 1}")
        if min(self.perm[k:] + self.perm[:k] for k in range(n)) != self.perm:
            raise ValueError("perm is not the minimal rotation of its necklace")
        return self

    @property
    def label(self) -> str:
        return "-".join(str(i) for i in self.perm)


class ProblemSpec(BaseModel):
    """One solve instance: kernel, masses, spin (A, or B for curved) and variant."""

    model_config = ConfigDict(extra="forbid")

    kernel: InteractionKernel
    masses: MassVector
    spin: float = Field(gt=0, allow_inf_nan=False)
    variant: Variant = Variant.PLAIN

    @model_validator(mode="after")
    def _check_variant(self) -> "ProblemSpec":
        if self.variant == Variant.CURVED and self.kernel.family != KernelFamily.CURVED_HYPERBOLIC:
            raise ValueError("curved variant requires the curved_hyperbolic kernel")
        if self.variant == Variant.CENTRAL_MASS and self.masses.central is None:
            raise ValueError("central_mass variant requires masses.central")
        if self.variant != Variant.CENTRAL_MASS and self.masses.central is not None:
            raise ValueError(f"{self.variant.value} variant takes no central mass")

        from cocircular.kernels.admissibility import check_admissible

        verdict = check_admissible(self.kernel)
        if not verdict.admissible:
            raise ValueError(f"kernel inadmissible: {verdict.reason} at x={verdict.first_violation:.6g}")
        return self

    def with_masses(self, masses: MassVector) -> "ProblemSpec":
        """Same problem with the circle masses rearranged."""
        return self.model_copy(update={"masses": masses})


class HessianProbe(BaseModel):
    """Perturbation direction (rho, gamma_1..gamma_n) for the concavity quadratic form."""

    rho: FiniteFloat
    gamma: list[FiniteFloat] = Field(min_length=2)

    def as_vector(self) -> npt.NDArray[np.float64]:
        return np.concatenate(([self.rho], self.gamma))


class SolveOptions(BaseModel):
    """Knobs for the ascent solver and the multi-start battery."""

    tol_grad: float = Field(default=1e-10, gt=0)
    max_iter: int = Field(default=200, ge=1)
    starts: int = Field(default=20, ge=1)
    seed: int = Field(default=0, ge=0)
    perturb_angle: float = Field(default=0.3, ge=0)
    perturb_radius: float = Field(default=0.2, ge=0, lt=1)
    tol_eig: float = Field(default=1e-8, gt=0)
    tol_class: float = Field(default=1e-8, gt=0)
    min_gap: float = Field(default=MIN_ANGULAR_GAP, ge=MIN_ANGULAR_GAP)
    min_radius: float = Field(default=1e-6, gt=0)
    workers: int = Field(default=1, ge=1)


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    STEP_FAILURE = "step_failure"


class LocalMaxVerdict(BaseModel):
    """Second-order certificate at a stationary point."""

    is_local_max: bool
    spectrum: list[float]
    hessian_norm: float
    null_eigenvalue: float
    near_null_count: int
    null_direction_angle: float
    null_direction_confirmed: bool


class StationaryReport(BaseModel):
    """Result of one ascent run."""

    config: CircularConfig
    grad_norm: float
    hessian_spectrum: list[float]
    is_local_max: bool
    feasibility_margin: float | None = None
    feasible: bool | None = None
    iterations: int
    converged: bool
    status: SolveStatus
    potential: float
    residual_norm: float
    is_relative_equilibrium: bool
    null_direction_angle: float | None = None


class UniquenessVerdict(str, Enum):
    UNIQUE = "unique"
    MULTIPLE = "multiple"
    NONE_FOUND = "none_found"


class StartOutcome(BaseModel):
    """How one randomized start of a uniqueness experiment ended."""

    start: int
    converged: bool
    status: SolveStatus
    grad_norm: float
    iterations: int
    is_local_max: bool
    class_index: int | None = None


class UniquenessReport(BaseModel):
    """Distinct equivalence classes found for one cyclic mass ordering."""

    ordering: OrderingId
    classes: list[CircularConfig]
    per_start: list[StartOutcome]
    verdict: UniquenessVerdict
    single_start: bool = False
    seed: int


class CheckStatus(str, Enum):
    """Derivative/gauge check result status."""

    PASS = "pass"
    FAIL = "fail"
    WARN = "warn"


class CheckResult(BaseModel):
    """Result of a derivative or gauge check."""

    check_name: str
    status: CheckStatus
    metric_value: float | None = None
    threshold: float | None = None
    message: str


class HyperboloidPoint(BaseModel):
    """Point on the upper sheet x1^2 + x2^2 - x3^2 = -1."""

    x1: FiniteFloat
    x2: FiniteFloat
    x3: float = Field(gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _on_sheet(self) -> "HyperboloidPoint":
        defect = self.x1**2 + self.x2**2 - self.x3**2 + 1.0
        if abs(defect) > 1e-10 * max(1.0, self.x3**2):
            raise ValueError(f"point is off the hyperboloid by {defect:.3g}")
        return self

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.x1, self.x2, self.x3])


class CurvedPolygonConfig(BaseModel):
    """Bodies p_i = (rho cos g_i, rho sin g_i, z) rotating about the x3 axis at spin B."""

    model_config = ConfigDict(extra="forbid")

    rho: float = Field(gt=0, allow_inf_nan=False)
    gamma: list[float]
    z: float = Field(gt=0, allow_inf_nan=False)
    spin: float = Field(gt=0, allow_inf_nan=False)
    masses: MassVector

    @model_validator(mode="after")
    def _check_geometry(self) -> "CurvedPolygonConfig":
        defect = self.rho**2 - self.z**2 + 1.0
        if abs(defect) > 1e-12 * max(1.0, self.z**2):
            raise ValueError(f"rho^2 - z^2 = -1 violated by {defect:.3g}")
        if self.masses.central is not None:
            raise ValueError("curved configurations take no central mass")
        _check_angles(self.gamma, self.masses.n)
        return self

    @property
    def angles(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.gamma, dtype=float)

    def planar(self) -> CircularConfig:
        """The planar circle (rho, gamma) underlying the lift."""
        return CircularConfig(r=self.rho, alpha=self.gamma, masses=self.masses)


def _as_float_array(value: Any) -> npt.NDArray[np.float64]:
    return np.array(value, dtype=float)


class PlanarState(BaseModel):
    """Positions and velocities of n bodies in the plane."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    positions: np.ndarray
    velocities: np.ndarray
    masses: list[PositiveMass]

    @field_validator("positions", "velocities", mode="before")
    @classmethod
    def _coerce_array(cls, value: Any) -> np.ndarray:
        return _as_float_array(value)

    @model_validator(mode="after")
    def _check_state(self) -> "PlanarState":
        n = len(self.masses)
        if self.positions.shape != (n, 2) or self.velocities.shape != (n, 2):
            raise ValueError(f"positions and velocities must have shape ({n}, 2)")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise ValueError("state must be finite")
        diffs = self.positions[:, None, :] - self.positions[None, :, :]
        dist = np.linalg.norm(diffs, axis=-1)[~np.eye(n, dtype=bool)]
        if np.any(dist <= 0):
            raise ValueError("two bodies occupy the same position")
        return self


class CurvedState(BaseModel):
    """Positions on the hyperboloid and tangent velocities of n bodies."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    positions: np.ndarray
    velocities: np.ndarray
    masses: list[PositiveMass]

    @field_validator("positions", "velocities", mode="before")
    @classmethod
    def _coerce_array(cls, value: Any) -> np.ndarray:
        return _as_float_array(value)

    @model_validator(mode="after")
    def _check_state(self) -> "CurvedState":
        n = len(self.masses)
        if self.positions.shape != (n, 3) or self.velocities.shape != (n, 3):
            raise ValueError(f"positions and velocities must have shape ({n}, 3)")
        if not (np.all(np.isfinite(self.positions)) and np.all(np.isfinite(self.velocities))):
            raise ValueError("state must be finite")
        if np.any(self.positions[:, 2] <= 0):
            raise ValueError("positions must lie on the upper sheet")
        p, v = self.positions, self.velocities
        norm = p[:, 0] ** 2 + p[:, 1] ** 2 - p[:, 2] ** 2
        tangency = p[:, 0] * v[:, 0] + p[:, 1] * v[:, 1] - p[:, 2] * v[:, 2]
        if np.max(np.abs(norm + 1.0)) > 1e-8 * max(1.0, float(np.max(p[:, 2] ** 2))):
            raise ValueError("positions violate p.p = -1")
        if np.max(np.abs(tangency)) > 1e-8 * max(1.0, float(np.max(np.abs(p) * np.abs(v)))):
            raise ValueError("velocities are not tangent to the hyperboloid")
        return self


class Geometry(str, Enum):
    PLANAR = "planar"
    CURVED = "curved"


class Trajectory(BaseModel):
    """Time-sampled states with drift diagnostics; truncated on collision."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    geometry: Geometry
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    masses: list[float]
    com_drift: np.ndarray | None = None
    constraint_drift: np.ndarray | None = None
    tangency_drift: np.ndarray | None = None
    rigid_deviation: np.ndarray | None = None
    truncated_at: float | None = None
    error: str | None = None

    @model_validator(mode="after")
    def _check_times(self) -> "Trajectory":
        if self.times.ndim != 1 or len(self.times) == 0:
            raise ValueError("times must be a non-empty 1-d array")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.positions.shape[0] != len(self.times) or self.velocities.shape != self.positions.shape:
            raise ValueError("one position and velocity sample per time")
        return self

    @property
    def dimension(self) -> int:
        return int(self.positions.shape[-1])

    @property
    def truncated(self) -> bool:
        return self.error is not None


class OrbitCheck(BaseModel):
    """Comparison of an integrated orbit with its analytic rigid rotation."""

    residual: float
    periods: float
    dt: float
    steps: int
    max_com_drift: float | None = None
    max_constraint_drift: float | None = None
    max_tangency_drift: float | None = None
    max_height_drift: float | None = None
    truncated_at: float | None = None
    error: str | None = None
