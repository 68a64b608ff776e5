"""DuckDB ledger of solver and uniqueness runs."""

import json
from collections.abc import Sequence
from pathlib import Path

import duckdb
import structlog

from cocircular.models import ProblemSpec, StationaryReport, UniquenessReport

log = structlog.get_logger()

DEFAULT_DB_PATH = Path("data/cocircular.duckdb")


def _kernel_label(spec: ProblemSpec) -> str:
    return spec.kernel.model_dump_json(exclude_defaults=True)


class RunLedger:
    """DuckDB-based history of stationary solves and uniqueness verdicts."""

    def __init__(self, db_path: Path | str = DEFAULT_DB_PATH) -> None:
        self._db_path = Path(db_path)
        self._db_path.parent.mkdir(parents=True, exist_ok=True)
        self._con = duckdb.connect(str(self._db_path))
        self._init_schema()

    def _init_schema(self) -> None:
        self._con.execute("""
            CREATE TABLE IF NOT EXISTS stationary_runs (
                run_id INTEGER PRIMARY KEY,
                variant VARCHAR,
                kernel VARCHAR,
                masses VARCHAR,
                spin DOUBLE,
                radius DOUBLE,
                angles VARCHAR,
                grad_norm DOUBLE,
                iterations INTEGER,
                converged BOOLEAN,
                is_local_max BOOLEAN,
                feasibility_margin DOUBLE,
                recorded_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        """)

        self._con.execute("""
            CREATE SEQUENCE IF NOT EXISTS stationary_run_seq START 1
        """)

        self._con.execute("""
            CREATE TABLE IF NOT EXISTS uniqueness_runs (
                run_id INTEGER PRIMARY KEY,
                variant VARCHAR,
                kernel VARCHAR,
                masses VARCHAR,
                spin DOUBLE,
                ordering VARCHAR,
                verdict VARCHAR,
                classes INTEGER,
                converged INTEGER,
                starts INTEGER,
                seed INTEGER,
                recorded_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        """)

        self._con.execute("""
            CREATE SEQUENCE IF NOT EXISTS uniqueness_run_seq START 1
        """)

        log.debug("schema_initialized", db_path=str(self._db_path))

    def save_stationary(self, spec: ProblemSpec, report: StationaryReport) -> int:
        config = report.config
        self._con.execute(
            """
            INSERT INTO stationary_runs
            (run_id, variant, kernel, masses, spin, radius, angles, grad_norm,
             iterations, converged, is_local_max, feasibility_margin)
            VALUES (nextval('stationary_run_seq'), ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """,
            [
                spec.variant.value,
                _kernel_label(spec),
                json.dumps(config.masses.m),
                spec.spin,
                config.r,
                json.dumps(config.alpha),
                report.grad_norm,
                report.iterations,
                report.converged,
                report.is_local_max,
                report.feasibility_margin,
            ],
        )
        log.info("stationary_run_saved", variant=spec.variant.value, converged=report.converged)
        return 1

    def save_uniqueness(self, spec: ProblemSpec, reports: Sequence[UniquenessReport]) -> int:
        if not reports:
            return 0

        for r in reports:
            self._con.execute(
                """
                INSERT INTO uniqueness_runs
                (run_id, variant, kernel, masses, spin, ordering, verdict, classes, converged, starts, seed)
                VALUES (nextval('uniqueness_run_seq'), ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                [
                    spec.variant.value,
                    _kernel_label(spec),
                    json.dumps(spec.masses.m),
                    spec.spin,
                    r.ordering.label,
                    r.verdict.value,
                    len(r.classes),
                    sum(1 for s in r.per_start if s.converged),
                    len(r.per_start),
                    r.seed,
                ],
            )
        log.info("uniqueness_runs_saved", count=len(reports))
        return len(reports)

    def get_recent_solves(self, limit: int = 20) -> list[dict[str, object]]:
        result = self._con.execute(
            """
            SELECT variant, masses, spin, radius, grad_norm, converged, is_local_max, recorded_at
            FROM stationary_runs
            ORDER BY run_id DESC
            LIMIT ?
            """,
            [limit],
        ).fetchall()
        return [
            {
                "variant": row[0],
                "masses": json.loads(row[1]),
                "spin": row[2],
                "radius": row[3],
                "grad_norm": row[4],
                "converged": row[5],
                "is_local_max": row[6],
                "recorded_at": row[7],
            }
            for row in result
        ]

    def get_verdict_summary(self) -> dict[str, int]:
        """Count of the latest verdict per (variant, kernel, masses, spin, ordering)."""
        result = self._con.execute("""
            WITH recent AS (
                SELECT *, ROW_NUMBER() OVER (
                    PARTITION BY variant, kernel, masses, spin, ordering ORDER BY run_id DESC
                ) as rn
                FROM uniqueness_runs
            )
            SELECT verdict, COUNT(*) as count
            FROM recent
            WHERE rn = 1
            GROUP BY verdict
        """).fetchall()

        return {row[0]: row[1] for row in result}

    def close(self) -> None:
        self._con.close()

    def __enter__(self) -> "RunLedger":
        return self

    def __exit__(self, *args: object) -> None:
        self.close()
