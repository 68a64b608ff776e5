"""Command-line interface for cocircular."""

import logging
import math
import sys
from pathlib import Path

import structlog
import typer
from rich.console import Console
from rich.table import Table

from cocircular.checks import DerivativeChecker
from cocircular.configuration import enumerate_orderings, ordered_masses
from cocircular.dynamics import trace_orbit, write_trajectory_csv
from cocircular.errors import CocircularError, SpecFileError, UsageError
from cocircular.models import (
    TWO_PI,
    CheckStatus,
    CircularConfig,
    ProblemSpec,
    SolveOptions,
    StationaryReport,
    UniquenessVerdict,
    Variant,
)
from cocircular.solver import default_start, solve_stationary, uniqueness_experiment, verify_local_max
from cocircular.specfile import ProblemSpecFile, ReportFile, load_problem, write_report
from cocircular.storage import DEFAULT_DB_PATH, RunLedger
from cocircular.variational import feasibility_margin

# Configure structured logging
structlog.configure(
    processors=[
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.dev.ConsoleRenderer(),
    ],
    wrapper_class=structlog.make_filtering_bound_logger(logging.INFO),
    logger_factory=structlog.PrintLoggerFactory(sys.stderr),
)

log = structlog.get_logger()

app = typer.Typer(
    name="cocircular",
    help="Co-circular relative equilibria: solve, certify, count and simulate",
    no_args_is_help=True,
)
console = Console()

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CERTIFIED = 2
EXIT_INFEASIBLE = 3
EXIT_COLLISION = 4
EXIT_RESIDUAL = 5

STATUS_STYLE = {
    "pass": "[green]PASS[/green]",
    "warn": "[yellow]WARN[/yellow]",
    "fail": "[red]FAIL[/red]",
}
VERDICT_STYLE = {
    "unique": "[green]unique[/green]",
    "multiple": "[red]multiple[/red]",
    "none_found": "[yellow]none_found[/yellow]",
}


def _fail(message: str, code: int = EXIT_INPUT) -> typer.Exit:
    console.print(f"[bold red]error:[/bold red] {message}")
    return typer.Exit(code=code)


def _load(problem: Path) -> tuple[ProblemSpecFile, ProblemSpec, CircularConfig | None]:
    try:
        spec_file = load_problem(problem)
        return spec_file, spec_file.problem(), spec_file.initial_config()
    except SpecFileError as exc:
        raise _fail(f"{problem}: {exc}") from exc


def _report_path(problem: Path, out: Path | None, suffix: str = ".report.json") -> Path:
    return out if out is not None else problem.with_name(problem.stem + suffix)


def _start_margin(spec: ProblemSpec, start: CircularConfig | None) -> float | None:
    if spec.variant != Variant.CENTRAL_MASS or start is None:
        return None
    return feasibility_margin(spec, start)


def _print_stationary(report: StationaryReport) -> None:
    table = Table(title="Stationary Configuration")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right", style="bold")

    config = report.config
    table.add_row("status", report.status.value)
    table.add_row("iterations", str(report.iterations))
    table.add_row("r", f"{config.r:.12g}")
    table.add_row("angles", ", ".join(f"{a:.10g}" for a in config.alpha))
    table.add_row("masses", ", ".join(f"{m:g}" for m in config.masses.m))
    table.add_row("|grad|", f"{report.grad_norm:.3e}")
    table.add_row("potential", f"{report.potential:.12g}")
    table.add_row("spectrum", ", ".join(f"{v:.6g}" for v in report.hessian_spectrum))
    table.add_row("local max", "[green]yes[/green]" if report.is_local_max else "[red]no[/red]")
    table.add_row("relative equilibrium", "yes" if report.is_relative_equilibrium else "no")
    if report.feasibility_margin is not None:
        table.add_row("feasibility margin", f"{report.feasibility_margin:.12g}")
    console.print(table)


@app.command()
def solve(
    problem: Path = typer.Option(..., "--problem", help="Problem-spec JSON file"),
    out: Path = typer.Option(None, help="Report path (default: <problem>.report.json)"),
    tol_grad: float = typer.Option(1e-10, help="Gradient-norm convergence tolerance"),
    max_iter: int = typer.Option(200, help="Maximum ascent iterations"),
    db_path: Path = typer.Option(None, "--db", help="Append the run to this DuckDB ledger"),
) -> None:
    """Find a stationary configuration and certify it as a local maximum."""
    spec_file, spec, start = _load(problem)
    margin = _start_margin(spec, start)
    options = SolveOptions(tol_grad=tol_grad, max_iter=max_iter)

    infeasible = margin is not None and margin <= 0
    report = None
    try:
        report = solve_stationary(spec, start or default_start(spec), options)
    except CocircularError as exc:
        if not infeasible:
            raise _fail(str(exc)) from exc
        log.warning("solve_from_infeasible_start_failed", error=str(exc))
    if report is not None:
        _print_stationary(report)

    path = write_report(
        ReportFile(command="solve", spec=spec_file, start_feasibility_margin=margin, stationary=report),
        _report_path(problem, out),
    )
    console.print(f"Report: [cyan]{path}[/cyan]")

    if db_path is not None and report is not None:
        with RunLedger(db_path) as ledger:
            ledger.save_stationary(spec, report)

    if infeasible:
        raise _fail(f"supplied configuration is infeasible: margin A^2 r - m_c g(r) = {margin:.6g}", EXIT_INFEASIBLE)
    assert report is not None
    if not report.converged:
        raise _fail(f"ascent stopped without converging ({report.status.value})", EXIT_NOT_CERTIFIED)
    if not report.is_local_max:
        raise _fail("stationary point is not a nondegenerate local maximum", EXIT_NOT_CERTIFIED)


@app.command()
def verify(
    problem: Path = typer.Option(..., "--problem", help="Problem-spec JSON file with a config"),
    out: Path = typer.Option(None, help="Report path (default: <problem>.report.json)"),
    tol_grad: float = typer.Option(1e-10, help="Stationarity tolerance for the certificate"),
) -> None:
    """Run derivative checks and certify the configuration supplied in the problem file."""
    spec_file, spec, start = _load(problem)
    if start is None:
        raise _fail("verify needs a config in the problem file")

    checker = DerivativeChecker()
    results = checker.check_kernel(spec.kernel) + checker.check_potential(spec, start)

    table = Table(title="Derivative Checks")
    table.add_column("Check", style="cyan")
    table.add_column("Status", style="bold")
    table.add_column("Message")
    for result in results:
        table.add_row(
            result.check_name,
            STATUS_STYLE.get(result.status.value, result.status.value),
            result.message,
        )
    console.print(table)
    passed = sum(1 for r in results if r.status == CheckStatus.PASS)
    console.print(f"\n[bold]{passed}/{len(results)} checks passed[/bold]")

    margin = _start_margin(spec, start)
    report = ReportFile(command="verify", spec=spec_file, start_feasibility_margin=margin, checks=results)
    code = EXIT_OK
    message = None
    try:
        report.certificate = verify_local_max(spec, start, SolveOptions(tol_grad=tol_grad))
    except UsageError as exc:
        code, message = EXIT_NOT_CERTIFIED, str(exc)
    else:
        spectrum = ", ".join(f"{v:.6g}" for v in report.certificate.spectrum)
        console.print(f"Reduced spectrum: {spectrum}")
        if not report.certificate.null_direction_confirmed:
            angle = report.certificate.null_direction_angle
            code, message = EXIT_NOT_CERTIFIED, f"null direction is not the rigid rotation (angle {angle:.3g} rad)"
        elif not report.certificate.is_local_max:
            code, message = EXIT_NOT_CERTIFIED, "configuration is not a nondegenerate local maximum"
    if any(r.status == CheckStatus.FAIL for r in results) and code == EXIT_OK:
        code, message = EXIT_NOT_CERTIFIED, "derivative checks failed"
    if margin is not None and margin <= 0:
        code, message = EXIT_INFEASIBLE, f"configuration is infeasible: margin = {margin:.6g}"

    path = write_report(report, _report_path(problem, out))
    console.print(f"Report: [cyan]{path}[/cyan]")
    if code != EXIT_OK:
        raise _fail(message or "not certified", code)
    console.print("[bold green]Certified local maximum[/bold green]")


@app.command()
def uniqueness(
    problem: Path = typer.Option(..., "--problem", help="Problem-spec JSON file"),
    orderings: str = typer.Option("all", help="'all' or a 0-based ordering index"),
    starts: int = typer.Option(20, help="Randomized starts per ordering"),
    seed: int = typer.Option(0, help="RNG seed"),
    workers: int = typer.Option(1, help="Threads for the multi-start runs"),
    out: Path = typer.Option(None, help="Report path (default: <problem>.report.json)"),
    db_path: Path = typer.Option(None, "--db", help="Append verdicts to this DuckDB ledger"),
) -> None:
    """Count distinct stationary classes per cyclic mass ordering."""
    spec_file, spec, _ = _load(problem)
    necklaces = enumerate_orderings(spec.masses)
    if orderings != "all":
        try:
            index = int(orderings)
        except ValueError as exc:
            raise _fail(f"--orderings must be 'all' or an index, got {orderings!r}") from exc
        if not 0 <= index < len(necklaces):
            raise _fail(f"ordering index {index} out of range 0..{len(necklaces) - 1}")
        necklaces = [necklaces[index]]

    try:
        options = SolveOptions(starts=starts, seed=seed, workers=workers)
    except ValueError as exc:
        raise _fail(str(exc)) from exc

    reports = [uniqueness_experiment(spec, ordering, options) for ordering in necklaces]

    table = Table(title="Uniqueness by Ordering")
    table.add_column("Ordering", style="cyan")
    table.add_column("Masses")
    table.add_column("Verdict", style="bold")
    table.add_column("Classes", justify="right")
    table.add_column("Converged", justify="right")
    for report in reports:
        masses = ordered_masses(spec.masses, report.ordering).m
        converged = sum(1 for s in report.per_start if s.converged)
        table.add_row(
            report.ordering.label,
            ", ".join(f"{m:g}" for m in masses),
            VERDICT_STYLE.get(report.verdict.value, report.verdict.value),
            str(len(report.classes)),
            f"{converged}/{len(report.per_start)}",
        )
    console.print(table)
    if starts == 1:
        console.print("[yellow]Single start per ordering: a 'unique' verdict is not evidence of uniqueness[/yellow]")

    path = write_report(
        ReportFile(command="uniqueness", seed=seed, spec=spec_file, uniqueness=reports),
        _report_path(problem, out),
    )
    console.print(f"Report: [cyan]{path}[/cyan]")

    if db_path is not None:
        with RunLedger(db_path) as ledger:
            ledger.save_uniqueness(spec, reports)

    if any(r.verdict == UniquenessVerdict.MULTIPLE for r in reports):
        raise _fail("an ordering has more than one stationary class", EXIT_NOT_CERTIFIED)


@app.command()
def simulate(
    problem: Path = typer.Option(..., "--problem", help="Problem-spec JSON file"),
    tmax: float = typer.Option(None, help="Integration time (default: one period 2pi/spin)"),
    dt: float = typer.Option(None, help="Step size (default: period / 10000)"),
    tol: float = typer.Option(1e-5, help="Largest acceptable orbit residual"),
    as_given: bool = typer.Option(False, "--as-given", help="Integrate the supplied config without solving"),
    out: Path = typer.Option(None, help="Trajectory CSV (default: <problem>.trajectory.csv)"),
    report_out: Path = typer.Option(None, "--report", help="Report path (default: <problem>.report.json)"),
) -> None:
    """Integrate the rigid-rotation initial condition and compare with the analytic orbit."""
    spec_file, spec, start = _load(problem)
    if as_given and start is None:
        raise _fail("--as-given needs a config in the problem file")

    stationary = None
    if as_given and start is not None:
        config = start
    else:
        try:
            stationary = solve_stationary(spec, start or default_start(spec))
        except CocircularError as exc:
            raise _fail(str(exc)) from exc
        if not stationary.converged:
            raise _fail(f"ascent stopped without converging ({stationary.status.value})", EXIT_NOT_CERTIFIED)
        config = stationary.config

    period = TWO_PI / spec.spin
    t_max = period if tmax is None else tmax
    step = period / 10_000 if dt is None else dt
    if not (t_max > 0 and step > 0):
        raise _fail("--tmax and --dt must be positive")

    trajectory, check = trace_orbit(
        config, spec, periods=t_max / period, steps_per_period=max(1, math.ceil(period / step - 1e-9))
    )
    csv_path = write_trajectory_csv(trajectory, _report_path(problem, out, ".trajectory.csv"))

    table = Table(title="Orbit Check")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", justify="right", style="bold")
    table.add_row("periods", f"{check.periods:.6g}")
    table.add_row("steps", str(check.steps))
    table.add_row("dt", f"{check.dt:.6g}")
    table.add_row("orbit residual", f"{check.residual:.3e}")
    for label, value in (
        ("centre-of-mass drift", check.max_com_drift),
        ("constraint drift", check.max_constraint_drift),
        ("tangency drift", check.max_tangency_drift),
        ("height drift", check.max_height_drift),
    ):
        if value is not None:
            table.add_row(label, f"{value:.3e}")
    console.print(table)
    console.print(f"Trajectory: [cyan]{csv_path}[/cyan]")

    path = write_report(
        ReportFile(command="simulate", spec=spec_file, stationary=stationary, orbit=check),
        _report_path(problem, report_out),
    )
    console.print(f"Report: [cyan]{path}[/cyan]")

    if check.error is not None:
        raise _fail(f"{check.error}; trajectory truncated at t={check.truncated_at:.6g}", EXIT_COLLISION)
    if check.residual > tol:
        raise _fail(f"orbit residual {check.residual:.3e} exceeds tolerance {tol:g}", EXIT_RESIDUAL)


@app.command(name="orderings")
def list_orderings(
    problem: Path = typer.Option(..., "--problem", help="Problem-spec JSON file"),
) -> None:
    """List the cyclic mass orderings (up to rotation) of the problem's masses."""
    _, spec, _ = _load(problem)
    table = Table(title="Cyclic Orderings")
    table.add_column("Index", justify="right")
    table.add_column("Ordering", style="cyan")
    table.add_column("Masses")
    for index, ordering in enumerate(enumerate_orderings(spec.masses)):
        masses = ordered_masses(spec.masses, ordering).m
        table.add_row(str(index), ordering.label, ", ".join(f"{m:g}" for m in masses))
    console.print(table)


@app.command()
def history(
    db_path: Path = typer.Option(DEFAULT_DB_PATH, "--db", help="Database path"),
    limit: int = typer.Option(10, help="Recent solves to show"),
) -> None:
    """Show the run ledger: verdict counts and recent solves."""
    if not db_path.exists():
        console.print("[yellow]No ledger found. Pass --db to solve or uniqueness first.[/yellow]")
        return

    with RunLedger(db_path) as ledger:
        summary = ledger.get_verdict_summary()
        recent = ledger.get_recent_solves(limit=limit)

    console.print("[bold]Uniqueness Verdicts:[/bold]")
    for verdict, count in summary.items():
        console.print(f"  {VERDICT_STYLE.get(verdict, verdict)}: {count}")
    console.print()

    if recent:
        table = Table(title="Recent Solves")
        table.add_column("Variant", style="cyan")
        table.add_column("Masses")
        table.add_column("Spin", justify="right")
        table.add_column("r", justify="right")
        table.add_column("Local max")
        for row in recent:
            table.add_row(
                str(row["variant"]),
                ", ".join(f"{m:g}" for m in row["masses"]),  # type: ignore[attr-defined]
                f"{row['spin']:.6g}",
                f"{row['radius']:.10g}",
                "yes" if row["is_local_max"] else "no",
            )
        console.print(table)


if __name__ == "__main__":
    app()
