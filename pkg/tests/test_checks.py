"""Tests for the derivative and gauge checks."""

import math

import numpy as np
import pytest

from cocircular.checks import DerivativeChecker, central_difference, relative_error
from cocircular.models import (
    AntiderivativeMode,
    CheckStatus,
    CircularConfig,
    InteractionKernel,
    MassVector,
    ProblemSpec,
    Variant,
)


@pytest.fixture
def checker() -> DerivativeChecker:
    return DerivativeChecker()


@pytest.fixture
def scalene() -> tuple[ProblemSpec, CircularConfig]:
    masses = MassVector(m=[1.0, 2.0, 3.0, 0.5])
    spec = ProblemSpec(kernel=InteractionKernel.power_law(3.0), masses=masses, spin=1.2)
    return spec, CircularConfig(r=1.1, alpha=[0.0, 1.3, 2.9, 4.6], masses=masses)


def _oracle_battery(count: int) -> list[tuple[ProblemSpec, CircularConfig]]:
    """Random configurations over every kernel family, with W for the central-mass cases."""
    rng = np.random.default_rng(2024)
    families = [
        (InteractionKernel.power_law(3.0), Variant.PLAIN),
        (InteractionKernel.power_law(2.0), Variant.PLAIN),
        (InteractionKernel.quasi_homogeneous(1.0, 3.0, 0.3, 5.0), Variant.PLAIN),
        (InteractionKernel.curved(), Variant.CURVED),
        (InteractionKernel.power_law(3.0), Variant.CENTRAL_MASS),
        (InteractionKernel.quasi_homogeneous(1.0, 2.5, 0.5, 4.0), Variant.CENTRAL_MASS),
    ]
    cases = []
    for k in range(count):
        kernel, variant = families[k % len(families)]
        n = int(rng.integers(2, 7))
        gaps = rng.uniform(0.3, 1.0, n)
        alpha = np.concatenate(([0.0], np.cumsum(gaps)[:-1] / gaps.sum() * 2 * math.pi))
        central = float(rng.uniform(0.5, 5.0)) if variant == Variant.CENTRAL_MASS else None
        masses = MassVector(m=rng.uniform(0.5, 3.0, n).tolist(), central=central)
        spec = ProblemSpec(kernel=kernel, masses=masses, spin=float(rng.uniform(0.5, 2.0)), variant=variant)
        config = CircularConfig(r=float(rng.uniform(0.6, 1.8)), alpha=alpha.tolist(), masses=masses)
        cases.append((spec, config))
    return cases


class TestCentralDifference:
    def test_scalar_function(self) -> None:
        y = np.array([1.0, 2.0])
        fd = central_difference(lambda v: float(v[0] ** 2 * v[1]), y)
        np.testing.assert_allclose(fd, [4.0, 1.0], rtol=1e-9)

    def test_vector_function_gives_jacobian(self) -> None:
        y = np.array([0.5, -1.0])
        fd = central_difference(lambda v: np.array([v[0] * v[1], math.sin(v[0])]), y)
        np.testing.assert_allclose(fd, [[-1.0, 0.5], [math.cos(0.5), 0.0]], rtol=1e-9, atol=1e-12)

    def test_relative_error_floor(self) -> None:
        assert relative_error(np.array([1e-7]), np.array([0.0])) == pytest.approx(1e-7)


class TestPotentialChecks:
    def test_all_pass(self, checker: DerivativeChecker, scalene: tuple[ProblemSpec, CircularConfig]) -> None:
        results = checker.check_potential(*scalene)
        assert [r.check_name for r in results] == [
            "gradient_oracle",
            "hessian_oracle",
            "hessian_symmetry",
            "rotation_gauge",
        ]
        assert all(r.status == CheckStatus.PASS for r in results)

    def test_central_mass_variant(self, checker: DerivativeChecker) -> None:
        masses = MassVector(m=[1.0, 2.0, 3.0], central=5.0)
        spec = ProblemSpec(
            kernel=InteractionKernel.quasi_homogeneous(1.0, 3.0, 0.2, 4.0),
            masses=masses,
            spin=2.0,
            variant=Variant.CENTRAL_MASS,
        )
        config = CircularConfig(r=0.7, alpha=[0.0, 2.0, 4.2], masses=masses)
        assert all(r.status == CheckStatus.PASS for r in checker.check_potential(spec, config))

    def test_metric_and_threshold_recorded(
        self, checker: DerivativeChecker, scalene: tuple[ProblemSpec, CircularConfig]
    ) -> None:
        gradient = next(r for r in checker.check_potential(*scalene) if r.check_name == "gradient_oracle")
        assert gradient.threshold == 1e-6
        assert gradient.metric_value is not None
        assert gradient.metric_value <= 1e-6

    @pytest.mark.parametrize("case", _oracle_battery(120))
    def test_random_battery_passes(self, checker: DerivativeChecker, case: tuple[ProblemSpec, CircularConfig]) -> None:
        results = checker.check_potential(*case)
        assert all(r.status == CheckStatus.PASS for r in results), [r.message for r in results]


class TestKernelChecks:
    @pytest.mark.parametrize(
        "kernel",
        [InteractionKernel.power_law(3.0), InteractionKernel.power_law(2.0), InteractionKernel.curved()],
        ids=["newton", "logarithmic", "curved"],
    )
    def test_closed_forms_pass(self, checker: DerivativeChecker, kernel: InteractionKernel) -> None:
        results = checker.check_kernel(kernel)
        assert [r.check_name for r in results] == ["admissibility", "g_prime_oracle", "antiderivative_oracle"]
        assert all(r.status == CheckStatus.PASS for r in results)

    def test_inadmissible_kernel_fails(self, checker: DerivativeChecker) -> None:
        admissibility = checker.check_kernel(InteractionKernel.power_law(0.5))[0]
        assert admissibility.status == CheckStatus.FAIL
        assert "g increasing" in admissibility.message

    def test_quadrature_near_reference(self, checker: DerivativeChecker) -> None:
        kernel = InteractionKernel.power_law(
            3.0, domain_lo=0.5, domain_hi=2.0, antiderivative=AntiderivativeMode.QUADRATURE
        )
        antiderivative = checker.check_kernel(kernel)[2]
        assert antiderivative.status in (CheckStatus.PASS, CheckStatus.WARN)
