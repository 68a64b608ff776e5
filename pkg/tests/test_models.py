"""Tests for data models."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from cocircular.models import (
    CircularConfig,
    CurvedPolygonConfig,
    CurvedState,
    HyperboloidPoint,
    InteractionKernel,
    KernelFamily,
    MassVector,
    OrderingId,
    PlanarState,
    ProblemSpec,
    SolveOptions,
    Trajectory,
    Variant,
)


@pytest.fixture
def pair() -> MassVector:
    return MassVector(m=[1.0, 1.0])


class TestInteractionKernel:
    def test_power_law_constructor(self) -> None:
        kernel = InteractionKernel.power_law(3.0)
        assert kernel.family == KernelFamily.POWER_LAW
        assert kernel.a == 3.0
        assert kernel.domain_lo == 1e-3

    def test_power_law_requires_exponent(self) -> None:
        with pytest.raises(ValidationError):
            InteractionKernel(family=KernelFamily.POWER_LAW)

    def test_quasi_homogeneous_names_missing_parameters(self) -> None:
        with pytest.raises(ValidationError, match="c2, b"):
            InteractionKernel(family=KernelFamily.QUASI_HOMOGENEOUS, c1=1.0, a=3.0)

    def test_unknown_field_rejected(self) -> None:
        with pytest.raises(ValidationError):
            InteractionKernel(family=KernelFamily.POWER_LAW, a=3.0, exponent=2.0)

    def test_domain_must_be_increasing(self) -> None:
        with pytest.raises(ValidationError):
            InteractionKernel.power_law(3.0, domain_lo=2.0, domain_hi=1.0)


class TestMassVector:
    def test_needs_two_bodies(self) -> None:
        with pytest.raises(ValidationError):
            MassVector(m=[1.0])

    def test_masses_positive(self) -> None:
        with pytest.raises(ValidationError):
            MassVector(m=[1.0, 0.0])

    def test_totals(self) -> None:
        masses = MassVector(m=[1.0, 2.0, 3.0], central=4.0)
        assert masses.n == 3
        assert masses.circle_total == 6.0
        assert masses.total == 10.0


class TestCircularConfig:
    def test_valid(self, pair: MassVector) -> None:
        config = CircularConfig(r=1.0, alpha=[0.0, math.pi], masses=pair)
        assert config.n == 2
        np.testing.assert_allclose(config.angles, [0.0, math.pi])

    @pytest.mark.parametrize(
        "alpha",
        [
            [math.pi, 0.0],
            [0.0, 0.0],
            [0.0, 2 * math.pi],
            [-0.1, 1.0],
            [0.0, 1e-9],
            [0.0, 1.0, 2.0],
        ],
    )
    def test_invalid_angles(self, pair: MassVector, alpha: list[float]) -> None:
        with pytest.raises(ValidationError):
            CircularConfig(r=1.0, alpha=alpha, masses=pair)

    def test_wraparound_gap_checked(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError, match="collision"):
            CircularConfig(r=1.0, alpha=[0.0, 2 * math.pi - 1e-9], masses=pair)

    def test_radius_positive(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError):
            CircularConfig(r=0.0, alpha=[0.0, math.pi], masses=pair)


class TestOrderingId:
    def test_minimal_rotation_accepted(self) -> None:
        assert OrderingId(perm=[0, 2, 1]).label == "0-2-1"

    def test_non_minimal_rotation_rejected(self) -> None:
        with pytest.raises(ValidationError):
            OrderingId(perm=[1, 2, 0])

    def test_not_a_permutation(self) -> None:
        with pytest.raises(ValidationError):
            OrderingId(perm=[0, 0, 1])


class TestProblemSpec:
    def test_inadmissible_kernel_rejected(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError, match="kernel inadmissible: g increasing"):
            ProblemSpec(kernel=InteractionKernel.power_law(0.5), masses=pair, spin=1.0)

    def test_central_variant_needs_central_mass(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError):
            ProblemSpec(kernel=InteractionKernel.power_law(3.0), masses=pair, spin=1.0, variant=Variant.CENTRAL_MASS)

    def test_plain_variant_rejects_central_mass(self) -> None:
        with pytest.raises(ValidationError):
            ProblemSpec(
                kernel=InteractionKernel.power_law(3.0),
                masses=MassVector(m=[1.0, 1.0], central=1.0),
                spin=1.0,
            )

    def test_curved_variant_needs_curved_kernel(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError):
            ProblemSpec(kernel=InteractionKernel.power_law(3.0), masses=pair, spin=1.0, variant=Variant.CURVED)

    def test_spin_positive(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError):
            ProblemSpec(kernel=InteractionKernel.power_law(3.0), masses=pair, spin=0.0)


class TestSolveOptions:
    def test_defaults(self) -> None:
        options = SolveOptions()
        assert options.tol_grad == 1e-10
        assert options.starts == 20
        assert options.tol_class == 1e-8

    def test_starts_at_least_one(self) -> None:
        with pytest.raises(ValidationError):
            SolveOptions(starts=0)


class TestCurvedTypes:
    def test_hyperboloid_point_on_sheet(self) -> None:
        point = HyperboloidPoint(x1=1.0, x2=0.0, x3=math.sqrt(2.0))
        np.testing.assert_allclose(point.as_array(), [1.0, 0.0, math.sqrt(2.0)])

    def test_hyperboloid_point_off_sheet(self) -> None:
        with pytest.raises(ValidationError):
            HyperboloidPoint(x1=1.0, x2=0.0, x3=1.0)

    def test_polygon_height_constraint(self, pair: MassVector) -> None:
        with pytest.raises(ValidationError):
            CurvedPolygonConfig(rho=1.0, gamma=[0.0, math.pi], z=1.5, spin=0.3, masses=pair)

    def test_polygon_planar_view(self, pair: MassVector) -> None:
        polygon = CurvedPolygonConfig(rho=1.0, gamma=[0.0, math.pi], z=math.sqrt(2.0), spin=0.3, masses=pair)
        assert polygon.planar().r == 1.0


class TestStates:
    def test_planar_state_coerces_lists(self) -> None:
        state = PlanarState(positions=[[1.0, 0.0], [-1.0, 0.0]], velocities=[[0.0, 1.0], [0.0, -1.0]], masses=[1, 1])
        assert state.positions.dtype == np.float64

    def test_planar_state_rejects_coincident_bodies(self) -> None:
        with pytest.raises(ValidationError):
            PlanarState(positions=[[1.0, 0.0], [1.0, 0.0]], velocities=np.zeros((2, 2)), masses=[1, 1])

    def test_curved_state_requires_tangent_velocity(self) -> None:
        z = math.sqrt(2.0)
        with pytest.raises(ValidationError, match="tangent"):
            CurvedState(
                positions=[[1.0, 0.0, z], [-1.0, 0.0, z]],
                velocities=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
                masses=[1, 1],
            )

    def test_trajectory_times_increasing(self) -> None:
        with pytest.raises(ValidationError):
            Trajectory(
                geometry="planar",
                times=np.array([0.0, 0.0]),
                positions=np.zeros((2, 2, 2)),
                velocities=np.zeros((2, 2, 2)),
                masses=[1.0, 1.0],
            )
