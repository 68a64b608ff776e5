"""JSON problem-spec files and the report files written next to them."""

import json
import math
from pathlib import Path

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from cocircular import __version__
from cocircular.errors import SpecFileError
from cocircular.kernels import check_admissible
from cocircular.models import (
    CheckResult,
    CircularConfig,
    InteractionKernel,
    LocalMaxVerdict,
    MassVector,
    OrbitCheck,
    PositiveMass,
    ProblemSpec,
    StationaryReport,
    UniquenessReport,
    Variant,
)

log = structlog.get_logger()

# Supplied z must agree with sqrt(1 + rho^2) to this
HEIGHT_TOLERANCE = 1e-9


class PlanarStart(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r: float = Field(gt=0, allow_inf_nan=False)
    alpha: list[float]


class CurvedStart(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rho: float = Field(gt=0, allow_inf_nan=False)
    gamma: list[float]
    z: float | None = Field(default=None, allow_inf_nan=False)


class ProblemSpecFile(BaseModel):
    """On-disk form of a problem: kernel, masses, spin, variant and an optional configuration."""

    model_config = ConfigDict(extra="forbid")

    kernel: InteractionKernel | None = None
    masses: list[PositiveMass] = Field(min_length=2)
    central_mass: PositiveMass | None = None
    spin: float = Field(gt=0, allow_inf_nan=False)
    variant: Variant = Variant.PLAIN
    config: PlanarStart | CurvedStart | None = None

    @field_validator("kernel")
    @classmethod
    def _check_kernel(cls, kernel: InteractionKernel | None) -> InteractionKernel | None:
        if kernel is not None:
            verdict = check_admissible(kernel)
            if not verdict.admissible:
                raise ValueError(f"kernel inadmissible: {verdict.reason} at x={verdict.first_violation:.6g}")
        return kernel

    def problem(self) -> ProblemSpec:
        """The solve instance; raises SpecFileError naming the inconsistent field."""
        kernel = self.kernel
        if kernel is None:
            if self.variant != Variant.CURVED:
                raise SpecFileError("kernel", f"required for the {self.variant.value} variant")
            kernel = InteractionKernel.curved()
        if self.variant == Variant.CENTRAL_MASS and self.central_mass is None:
            raise SpecFileError("central_mass", "required for the central_mass variant")
        if self.variant != Variant.CENTRAL_MASS and self.central_mass is not None:
            raise SpecFileError("central_mass", f"not allowed for the {self.variant.value} variant")
        try:
            return ProblemSpec(
                kernel=kernel,
                masses=MassVector(m=self.masses, central=self.central_mass),
                spin=self.spin,
                variant=self.variant,
            )
        except ValidationError as exc:
            raise SpecFileError("variant", _first_message(exc)) from exc

    def initial_config(self) -> CircularConfig | None:
        """Configuration supplied in the file, as a planar circle (rho, gamma for curved)."""
        start = self.config
        if start is None:
            return None
        if isinstance(start, CurvedStart):
            if self.variant != Variant.CURVED:
                raise SpecFileError("config", "rho/gamma configurations belong to the curved variant")
            if start.z is not None and abs(start.z - math.hypot(1.0, start.rho)) > HEIGHT_TOLERANCE:
                raise SpecFileError("config.z", f"z={start.z} is not sqrt(1 + rho^2) for rho={start.rho}")
            r, angles = start.rho, start.gamma
        else:
            r, angles = start.r, start.alpha
        try:
            return CircularConfig(r=r, alpha=angles, masses=MassVector(m=self.masses, central=self.central_mass))
        except ValidationError as exc:
            raise SpecFileError("config", _first_message(exc)) from exc


def _first_message(exc: ValidationError) -> str:
    error = exc.errors()[0]
    ctx = error.get("ctx") or {}
    return str(ctx.get("error", error["msg"]))


def _field_name(exc: ValidationError) -> str:
    loc = exc.errors()[0]["loc"]
    return ".".join(str(part) for part in loc) or "spec"


def load_problem(path: Path | str) -> ProblemSpecFile:
    """Parse and fully validate a problem-spec file.

    Raises SpecFileError for malformed JSON, unknown or invalid fields, an
    inadmissible kernel and inconsistent variant or configuration.
    """
    source = Path(path)
    try:
        data = json.loads(source.read_text())
    except OSError as exc:
        raise SpecFileError("path", f"cannot read {source}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFileError("document", f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc

    try:
        spec_file = ProblemSpecFile.model_validate(data)
    except ValidationError as exc:
        raise SpecFileError(_field_name(exc), _first_message(exc)) from exc

    spec_file.problem()
    spec_file.initial_config()
    log.info("problem_loaded", path=str(source), variant=spec_file.variant.value, n=len(spec_file.masses))
    return spec_file


class ReportFile(BaseModel):
    """Everything one CLI command produced. Contains no timestamps, so equal inputs give equal files."""

    tool: str = "cocircular"
    version: str = __version__
    command: str
    seed: int | None = None
    spec: ProblemSpecFile
    start_feasibility_margin: float | None = None
    stationary: StationaryReport | None = None
    certificate: LocalMaxVerdict | None = None
    checks: list[CheckResult] = Field(default_factory=list)
    uniqueness: list[UniquenessReport] = Field(default_factory=list)
    orbit: OrbitCheck | None = None


def write_report(report: ReportFile, path: Path | str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(report.model_dump_json(indent=2) + "\n")
    log.info("report_written", path=str(out), command=report.command)
    return out


def read_report(path: Path | str) -> ReportFile:
    return ReportFile.model_validate_json(Path(path).read_text())
