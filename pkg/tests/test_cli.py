"""Tests for the cocircular command line."""

import json
import math
from pathlib import Path
from typing import Any

import pandas as pd
import pytest
from typer.testing import CliRunner

from cocircular.cli import app
from cocircular.specfile import read_report

runner = CliRunner()

TWO_BODY: dict[str, Any] = {
    "kernel": {"family": "power_law", "a": 3.0},
    "masses": [1.0, 1.0],
    "spin": 0.5,
}


def _problem(tmp_path: Path, **overrides: Any) -> Path:
    path = tmp_path / "problem.json"
    path.write_text(json.dumps({**TWO_BODY, **overrides}))
    return path


def _flat(output: str) -> str:
    return " ".join(output.split())


class TestSolve:
    def test_two_body(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["solve", "--problem", str(_problem(tmp_path))])
        assert result.exit_code == 0, result.output
        report = read_report(tmp_path / "problem.report.json")
        assert report.command == "solve"
        assert report.stationary is not None
        assert report.stationary.config.r == pytest.approx(1.0, abs=1e-9)
        assert report.stationary.is_local_max

    def test_inadmissible_kernel(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, kernel={"family": "power_law", "a": 0.5})
        result = runner.invoke(app, ["solve", "--problem", str(problem)])
        assert result.exit_code == 1
        assert "kernel inadmissible: g increasing" in _flat(result.output)

    def test_infeasible_central_start(self, tmp_path: Path) -> None:
        problem = _problem(
            tmp_path,
            variant="central_mass",
            central_mass=1.0,
            config={"r": 1.0, "alpha": [0.0, math.pi]},
        )
        out = tmp_path / "central.json"
        result = runner.invoke(app, ["solve", "--problem", str(problem), "--out", str(out)])
        assert result.exit_code == 3
        assert read_report(out).start_feasibility_margin == pytest.approx(-0.75)

    def test_not_converged(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0])
        result = runner.invoke(app, ["solve", "--problem", str(problem), "--max-iter", "1"])
        assert result.exit_code == 2
        assert (tmp_path / "problem.report.json").exists()

    def test_ledger(self, tmp_path: Path) -> None:
        db = tmp_path / "runs.duckdb"
        runner.invoke(app, ["solve", "--problem", str(_problem(tmp_path)), "--db", str(db)])
        result = runner.invoke(app, ["history", "--db", str(db)])
        assert result.exit_code == 0
        assert "Recent Solves" in result.output

    def test_reports_are_reproducible(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0])
        first, second = tmp_path / "a.json", tmp_path / "b.json"
        runner.invoke(app, ["solve", "--problem", str(problem), "--out", str(first)])
        runner.invoke(app, ["solve", "--problem", str(problem), "--out", str(second)])
        assert first.read_text() == second.read_text()


class TestVerify:
    def test_certifies_two_body(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, config={"r": 1.0, "alpha": [0.0, math.pi]})
        result = runner.invoke(app, ["verify", "--problem", str(problem)])
        assert result.exit_code == 0, result.output
        assert "7/7 checks passed" in result.output
        report = read_report(tmp_path / "problem.report.json")
        assert report.certificate is not None
        assert report.certificate.is_local_max

    def test_non_stationary_config(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, config={"r": 1.2, "alpha": [0.0, math.pi]})
        assert runner.invoke(app, ["verify", "--problem", str(problem)]).exit_code == 2

    def test_needs_config(self, tmp_path: Path) -> None:
        assert runner.invoke(app, ["verify", "--problem", str(_problem(tmp_path))]).exit_code == 1


class TestUniqueness:
    def test_all_orderings_of_four(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0, 4.0], spin=1.0)
        result = runner.invoke(app, ["uniqueness", "--problem", str(problem), "--starts", "8"])
        assert result.exit_code == 0, result.output
        report = read_report(tmp_path / "problem.report.json")
        assert len(report.uniqueness) == 6
        assert report.seed == 0

    def test_repeated_masses_have_one_ordering(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 1.0, 2.0], spin=1.0)
        runner.invoke(app, ["uniqueness", "--problem", str(problem), "--starts", "3"])
        assert len(read_report(tmp_path / "problem.report.json").uniqueness) == 1

    def test_single_start_caveat(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0], spin=1.0)
        result = runner.invoke(app, ["uniqueness", "--problem", str(problem), "--orderings", "1", "--starts", "1"])
        assert result.exit_code == 0
        assert "not evidence of uniqueness" in _flat(result.output)
        (only,) = read_report(tmp_path / "problem.report.json").uniqueness
        assert only.single_start
        assert only.ordering.perm == [0, 2, 1]

    @pytest.mark.parametrize("index", ["2", "first"])
    def test_bad_ordering_index(self, tmp_path: Path, index: str) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0])
        assert runner.invoke(app, ["uniqueness", "--problem", str(problem), "--orderings", index]).exit_code == 1


class TestSimulate:
    def test_solved_two_body(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["simulate", "--problem", str(_problem(tmp_path))])
        assert result.exit_code == 0, result.output
        report = read_report(tmp_path / "problem.report.json")
        assert report.orbit is not None
        assert report.orbit.residual < 1e-6
        assert report.orbit.steps == 10_000
        frame = pd.read_csv(tmp_path / "problem.trajectory.csv")
        assert len(frame) == 10_001

    def test_perturbed_config_misses_orbit(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, config={"r": 1.05, "alpha": [0.0, math.pi]})
        result = runner.invoke(app, ["simulate", "--problem", str(problem), "--as-given"])
        assert result.exit_code == 5

    def test_curved_trajectory_has_heights(self, tmp_path: Path) -> None:
        problem = tmp_path / "curved.json"
        problem.write_text(json.dumps({"masses": [1.0, 1.0, 1.0], "spin": 0.5, "variant": "curved"}))
        out = tmp_path / "orbit.csv"
        result = runner.invoke(app, ["simulate", "--problem", str(problem), "--out", str(out), "--dt", "0.01"])
        assert result.exit_code == 0, result.output
        assert {"z_1", "vz_3"} <= set(pd.read_csv(out).columns)

    def test_collision(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, spin=1e-3, config={"r": 1.0, "alpha": [0.0, math.pi]})
        args = ["simulate", "--problem", str(problem), "--as-given", "--tmax", "5", "--dt", "0.01"]
        result = runner.invoke(app, args)
        assert result.exit_code == 4
        assert "truncated at t=" in _flat(result.output)

    def test_coarse_step_is_not_a_collision(self, tmp_path: Path) -> None:
        # spin 0.5 gives period 4 pi, so four steps per turn
        args = ["simulate", "--problem", str(_problem(tmp_path)), "--dt", repr(math.pi)]
        result = runner.invoke(app, args)
        assert result.exit_code in (0, 5), result.output
        report = read_report(tmp_path / "problem.report.json")
        assert report.orbit is not None
        assert report.orbit.truncated_at is None
        assert report.orbit.steps == 4

    def test_as_given_needs_config(self, tmp_path: Path) -> None:
        assert runner.invoke(app, ["simulate", "--problem", str(_problem(tmp_path)), "--as-given"]).exit_code == 1


class TestOrderingsAndHistory:
    def test_lists_orderings(self, tmp_path: Path) -> None:
        problem = _problem(tmp_path, masses=[1.0, 2.0, 3.0, 4.0])
        result = runner.invoke(app, ["orderings", "--problem", str(problem)])
        assert result.exit_code == 0
        assert "Cyclic Orderings" in result.output

    def test_history_without_ledger(self, tmp_path: Path) -> None:
        result = runner.invoke(app, ["history", "--db", str(tmp_path / "absent.duckdb")])
        assert result.exit_code == 0
        assert "No ledger found" in result.output
