"""Tests for hyperboloid geometry and the curved-polygon reduction."""

import math

import numpy as np
import pytest

from cocircular.curved import (
    curved_acceleration,
    frame_residuals,
    lift,
    minkowski,
    reduced_problem,
    reduction_residuals,
    rigid_state,
)
from cocircular.errors import UsageError
from cocircular.models import CircularConfig, CurvedPolygonConfig, HyperboloidPoint, MassVector
from cocircular.solver import solve_stationary
from cocircular.variational import balancing_spin

TWO_BODY_SPIN = 0.2973017


def _random_polygons(count: int) -> list[CurvedPolygonConfig]:
    rng = np.random.default_rng(11)
    polygons = []
    for _ in range(count):
        n = int(rng.integers(2, 7))
        gaps = rng.uniform(0.3, 1.0, n)
        alpha = np.concatenate(([0.0], np.cumsum(gaps)[:-1] / gaps.sum() * 2 * math.pi))
        masses = MassVector(m=rng.uniform(0.5, 3.0, n).tolist())
        config = CircularConfig(r=float(rng.uniform(0.3, 2.5)), alpha=alpha.tolist(), masses=masses)
        polygons.append(lift(config, float(rng.uniform(0.1, 1.5))))
    return polygons


@pytest.fixture
def equal_pair() -> CurvedPolygonConfig:
    masses = MassVector(m=[1.0, 1.0])
    spin = math.sqrt(2.0 * 8.0 ** -1.5)
    return lift(CircularConfig(r=1.0, alpha=[0.0, math.pi], masses=masses), spin)


@pytest.fixture
def scalene() -> CurvedPolygonConfig:
    masses = MassVector(m=[1.0, 2.0, 0.7])
    return lift(CircularConfig(r=0.8, alpha=[0.0, 2.3, 4.4], masses=masses), 0.6)


class TestGeometry:
    def test_minkowski_of_point_with_itself(self) -> None:
        point = HyperboloidPoint(x1=0.6, x2=0.8, x3=math.sqrt(2.0))
        assert minkowski(point, point) == pytest.approx(-1.0)

    def test_minkowski_broadcasts(self) -> None:
        p = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, math.sqrt(2.0)]])
        np.testing.assert_allclose(minkowski(p, p), [-1.0, -1.0])

    def test_lift_height(self, scalene: CurvedPolygonConfig) -> None:
        assert scalene.z == pytest.approx(math.sqrt(1.0 + 0.8**2))

    def test_lift_rejects_central_mass(self) -> None:
        config = CircularConfig(r=1.0, alpha=[0.0, 1.0], masses=MassVector(m=[1.0, 1.0], central=1.0))
        with pytest.raises(UsageError):
            lift(config, 1.0)

    def test_rigid_state_on_sheet_and_tangent(self, scalene: CurvedPolygonConfig) -> None:
        positions, velocities = rigid_state(scalene, t=1.7)
        np.testing.assert_allclose(minkowski(positions, positions), -1.0, atol=1e-14)
        np.testing.assert_allclose(minkowski(positions, velocities), 0.0, atol=1e-14)


class TestReduction:
    def test_two_body_spin(self, equal_pair: CurvedPolygonConfig) -> None:
        spec, planar = reduced_problem(equal_pair)
        assert balancing_spin(spec, planar) == pytest.approx(TWO_BODY_SPIN, abs=1e-7)

    def test_two_body_rotates_rigidly(self, equal_pair: CurvedPolygonConfig) -> None:
        np.testing.assert_allclose(frame_residuals(equal_pair), 0.0, atol=1e-14)

    def test_rigid_acceleration_is_centripetal(self, equal_pair: CurvedPolygonConfig) -> None:
        positions, _ = rigid_state(equal_pair, t=0.5)
        acceleration = curved_acceleration(equal_pair, 0.5, 1)
        np.testing.assert_allclose(acceleration[:2], -(equal_pair.spin**2) * positions[0, :2], atol=1e-14)
        assert acceleration[2] == pytest.approx(0.0, abs=1e-14)

    def test_acceleration_index_is_one_based(self, equal_pair: CurvedPolygonConfig) -> None:
        with pytest.raises(IndexError):
            curved_acceleration(equal_pair, 0.0, 3)

    def test_direct_and_reduced_residuals_agree(self, scalene: CurvedPolygonConfig) -> None:
        np.testing.assert_allclose(frame_residuals(scalene), reduction_residuals(scalene), rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("polygon", _random_polygons(50))
    def test_random_polygons_reduce_exactly(self, polygon: CurvedPolygonConfig) -> None:
        direct = frame_residuals(polygon)
        reduced = reduction_residuals(polygon)
        scale = max(1.0, float(np.max(np.abs(direct))))
        assert np.max(np.abs(direct - reduced)) <= 1e-10 * scale

    def test_solved_reduction_is_curved_equilibrium(self) -> None:
        masses = MassVector(m=[1.0, 1.0, 1.0])
        seed = lift(CircularConfig(r=1.0, alpha=[0.0, 2.0, 4.0], masses=masses), 0.5)
        spec, planar = reduced_problem(seed)
        report = solve_stationary(spec, planar)
        assert report.converged
        solved = lift(report.config, spec.spin)
        np.testing.assert_allclose(frame_residuals(solved), 0.0, atol=1e-9)
