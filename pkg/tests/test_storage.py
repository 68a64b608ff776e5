"""Tests for the DuckDB run ledger."""

from collections.abc import Iterator
from pathlib import Path

import pytest

from cocircular.models import InteractionKernel, MassVector, OrderingId, ProblemSpec, SolveOptions
from cocircular.solver import default_start, solve_stationary, uniqueness_experiment
from cocircular.storage import RunLedger


@pytest.fixture
def ledger(tmp_path: Path) -> Iterator[RunLedger]:
    with RunLedger(tmp_path / "nested" / "runs.duckdb") as db:
        yield db


@pytest.fixture
def spec() -> ProblemSpec:
    return ProblemSpec(kernel=InteractionKernel.power_law(3.0), masses=MassVector(m=[1.0, 2.0, 3.0]), spin=1.0)


class TestRunLedger:
    def test_save_and_read_solve(self, ledger: RunLedger, spec: ProblemSpec) -> None:
        report = solve_stationary(spec, default_start(spec))
        assert ledger.save_stationary(spec, report) == 1
        rows = ledger.get_recent_solves()
        assert len(rows) == 1
        assert rows[0]["variant"] == "plain"
        assert rows[0]["masses"] == [1.0, 2.0, 3.0]
        assert rows[0]["radius"] == report.config.r
        assert rows[0]["is_local_max"] is True

    def test_recent_solves_newest_first(self, ledger: RunLedger, spec: ProblemSpec) -> None:
        for spin in (1.0, 2.0, 3.0):
            faster = spec.model_copy(update={"spin": spin})
            ledger.save_stationary(faster, solve_stationary(faster, default_start(faster)))
        rows = ledger.get_recent_solves(limit=2)
        assert [row["spin"] for row in rows] == [3.0, 2.0]

    def test_empty_uniqueness_batch(self, ledger: RunLedger, spec: ProblemSpec) -> None:
        assert ledger.save_uniqueness(spec, []) == 0
        assert ledger.get_verdict_summary() == {}

    def test_verdict_summary_keeps_latest(self, ledger: RunLedger, spec: ProblemSpec) -> None:
        ordering = OrderingId(perm=[0, 1, 2])
        found = uniqueness_experiment(spec, ordering, SolveOptions(starts=3))
        missed = uniqueness_experiment(spec, ordering, SolveOptions(starts=2, max_iter=1))
        assert ledger.save_uniqueness(spec, [missed]) == 1
        assert ledger.get_verdict_summary() == {"none_found": 1}
        ledger.save_uniqueness(spec, [found])
        assert ledger.get_verdict_summary() == {"unique": 1}

    def test_reopen_keeps_history(self, tmp_path: Path, spec: ProblemSpec) -> None:
        path = tmp_path / "runs.duckdb"
        report = solve_stationary(spec, default_start(spec))
        with RunLedger(path) as first:
            first.save_stationary(spec, report)
        with RunLedger(path) as second:
            second.save_stationary(spec, report)
            assert len(second.get_recent_solves()) == 2
