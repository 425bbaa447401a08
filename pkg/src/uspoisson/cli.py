"""Command-line interface for uspoisson.

Main entry point for the application.
"""
# Created: 2026-10-18

import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from . import __version__
from .chebfun import Cheb2D
from .config import load_settings, save_settings
from .config.settings import BenchmarkSettings, default_config_dir
from .errors import ConfigError, ExpressionError, USPoissonError, UnresolvedError
from .export import ResultExporter
from .poisson import (
    ORACLE, ORACLE_MAX_N, AutoReport, ProblemSpec, boundary_error, grid_error, shift_report,
    solve_auto, solve_level,
)
from .problem import RunConfig, load_problem

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)


def setup_logging(verbose: bool = False, level: str = "INFO") -> None:
    """Configure logging with rich handler."""
    level = logging.DEBUG if verbose else getattr(logging, level.upper(), logging.INFO)

    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)]
    )


def fail(error: Exception, code: int) -> NoReturn:
    """One-line diagnostic on stderr, then exit."""
    message = " ".join(str(error).split())
    err_console.print(f"[red]Error:[/red] {escape(message)}", soft_wrap=True)
    sys.exit(code)


def exit_code_for(error: USPoissonError) -> int:
    if isinstance(error, (ConfigError, ExpressionError)):
        return EXIT_CONFIG
    return EXIT_SOLVER


@click.group(invoke_without_command=True)
@click.option('--version', is_flag=True, help='Show version and exit')
@click.option('-v', '--verbose', is_flag=True, help='Enable verbose logging')
@click.option('--config-dir', type=click.Path(file_okay=False),
              default=None, help='Configuration directory (default: ~/.config/uspoisson)')
@click.pass_context
def cli(ctx: click.Context, version: bool, verbose: bool, config_dir: Optional[str]) -> None:
    """uspoisson - spectral Poisson solver on [-1,1]^2.

    Solves problem files with the ultraspherical method and Zolotarev-shifted ADI.
    """
    if version:
        click.echo(f"uspoisson v{__version__}")
        sys.exit(0)

    ctx.ensure_object(dict)
    ctx.obj['config_dir'] = Path(config_dir) if config_dir else None
    settings = load_settings(ctx.obj['config_dir'])
    ctx.obj['settings'] = settings
    ctx.obj['verbose'] = verbose
    setup_logging(verbose, settings.logging.level)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@cli.command()
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), required=True,
              help='Problem file (YAML)')
@click.option('--oracle', is_flag=True, help=f'Solve with the dense Kronecker oracle (n <= {ORACLE_MAX_N})')
@click.option('--benchmark', is_flag=True, help='Time single-level solves over the benchmark sizes')
@click.option('--check', is_flag=True, help='Print the coefficient residual and boundary error')
@click.option('--quiet', is_flag=True, help='Only warnings and errors')
@click.option('-o', '--output-dir', type=click.Path(file_okay=False), default=None,
              help='Output directory (overrides output.directory)')
@click.pass_context
def solve(ctx: click.Context, config_path: str, oracle: bool, benchmark: bool, check: bool,
          quiet: bool, output_dir: Optional[str]) -> None:
    """Solve a problem file and write coefficients, grid values and a report.

    Exit status is 2 for problem-file and expression errors, 3 for solver
    failures (including an unresolved solution at max_n).

    \b
    Examples:
        uspoisson solve --config docs/problems/ex2.yaml --check
        uspoisson solve --config docs/problems/ex1.yaml --benchmark -o bench/
    """
    if quiet:
        logging.getLogger().setLevel(logging.WARNING)
    settings = ctx.obj['settings']
    try:
        config = load_problem(Path(config_path), settings)
        code = run(config, oracle=oracle, benchmark=benchmark, check=check, quiet=quiet,
                   directory=Path(output_dir) if output_dir else None)
    except USPoissonError as e:
        if ctx.obj.get('verbose'):
            err_console.print_exception()
        fail(e, exit_code_for(e))
    sys.exit(code)


def run(config: RunConfig, oracle: bool = False, benchmark: bool = False, check: bool = False,
        quiet: bool = False, directory: Optional[Path] = None) -> int:
    """Solve (or benchmark) one problem and write its result files.

    An unresolved solve still writes the best iterate before the error
    propagates.
    """
    spec = config.problem
    if oracle:
        spec = replace(spec, solver=ORACLE, max_n=min(spec.max_n, ORACLE_MAX_N))
    exporter = ResultExporter(config.output, directory)
    exporter.prepare()

    if benchmark:
        rows = run_benchmark(spec, config.benchmark)
        exporter.write_benchmark(rows)
        if not quiet:
            console.print(_benchmark_table(rows))
        return EXIT_OK

    try:
        u, report = solve_auto(spec)
    except UnresolvedError as e:
        if e.best is not None and e.report is not None:
            write_results(exporter, config, spec, e.best, e.report, check, quiet, resolved=False)
        raise
    write_results(exporter, config, spec, u, report, check, quiet)
    return EXIT_OK


def run_benchmark(spec: ProblemSpec, benchmark: BenchmarkSettings) -> List[Dict[str, Any]]:
    """One zero-start level per (tolerance, size); wall time covers assembly too."""
    rows = []
    for tolerance in benchmark.tolerances:
        level_spec = replace(spec, tolerance=tolerance)
        for n in benchmark.sizes:
            t0 = time.perf_counter()
            result = solve_level(level_spec, n)
            wall_time = time.perf_counter() - t0
            rows.append({
                "n": n,
                "tolerance": tolerance,
                "wall_time": wall_time,
                "iterations": result.report.solve.iterations_run,
                "shifts": result.report.shifts,
            })
            logger.info(f"Benchmark n={n}, tolerance={tolerance}: {wall_time:.3f}s")
    return rows


def write_results(exporter: ResultExporter, config: RunConfig, spec: ProblemSpec, u: Cheb2D,
                  report: AutoReport, check: bool, quiet: bool, resolved: bool = True) -> None:
    exporter.write_coefficients(u)
    exporter.write_grid(u)
    if spec.exact is not None:
        report.checks["grid_error"] = grid_error(u, spec.exact, config.output.grid_size)
    if check:
        report.checks["boundary_error"] = boundary_error(spec, u)
    exporter.write_report({
        "source": str(config.source) if config.source else None,
        "equation": spec.equation,
        "solver": spec.solver,
        "tolerance": spec.tolerance,
        "resolved": resolved,
        "expressions": config.expressions,
        **report.to_dict(),
    })
    if not quiet:
        console.print(_levels_table(report))
    if check or (not quiet and report.checks):
        console.print(_checks_table(report.checks))


def _levels_table(report: AutoReport) -> Table:
    table = Table(title=f"Levels (final n={report.final_n}, {report.wall_time:.3f}s)")
    table.add_column("n", justify="right")
    table.add_column("shifts", justify="right")
    table.add_column("order")
    table.add_column("iterations", justify="right")
    table.add_column("stopped by")
    table.add_column("resolved")
    for level in report.levels:
        table.add_row(
            str(level.n), str(level.shifts), level.order, str(level.solve.iterations_run),
            level.solve.terminated_by, "yes" if level.resolved else "no",
        )
    return table


def _checks_table(checks: Dict[str, float]) -> Table:
    table = Table(title="Checks")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name, value in checks.items():
        table.add_row(name.replace("_", " "), f"{value:.3e}")
    return table


def _benchmark_table(rows: List[Dict[str, Any]]) -> Table:
    table = Table(title="Benchmark")
    for name in ("n", "tolerance", "wall time (s)", "iterations", "shifts"):
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(str(row["n"]), f"{row['tolerance']:.0e}", f"{row['wall_time']:.3f}",
                      str(row["iterations"]), str(row["shifts"]))
    return table


@cli.command()
@click.option('-n', '--size', 'n', type=click.IntRange(min=4), default=2048, show_default=True,
              help='Truncation size of the Dirichlet Poisson system')
@click.option('--eps', type=click.FloatRange(min=0.0, min_open=True, max=1.0, max_open=True),
              default=2.2e-16, show_default=True, help='Target tolerance')
@click.option('--list', 'list_shifts', is_flag=True, help='Also list every shift pair')
def shifts(n: int, eps: float, list_shifts: bool) -> None:
    """Show the spectral interval and Zolotarev shift count for an n x n Poisson level."""
    try:
        interval, schedule = shift_report(n, eps)
    except USPoissonError as e:
        fail(e, exit_code_for(e))

    table = Table(title=f"Dirichlet Poisson, n={n}, eps={eps:.1e}")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("interval low", f"{interval.lo:.6e}")
    table.add_row("interval high", f"{interval.hi:.6e}")
    table.add_row("gamma", f"{schedule.gamma:.6e}")
    table.add_row("alpha", f"{schedule.alpha:.6e}")
    table.add_row("beta", f"{schedule.beta:.6e}")
    table.add_row("shifts (k)", str(schedule.k))
    table.add_row("bound", f"{schedule.bound:.3e}")
    console.print(table)

    if list_shifts:
        pairs = Table(title="Shift pairs")
        pairs.add_column("j", justify="right")
        pairs.add_column("p", justify="right")
        pairs.add_column("q", justify="right")
        for j, (p, q) in enumerate(zip(schedule.p, schedule.q), start=1):
            pairs.add_row(str(j), f"{p:.16e}", f"{q:.16e}")
        console.print(pairs)


@cli.command('init-config')
@click.option('--force', is_flag=True, help='Overwrite an existing config.yaml')
@click.pass_context
def init_config(ctx: click.Context, force: bool) -> None:
    """Write the current settings to the user config file."""
    config_dir = ctx.obj.get('config_dir') or default_config_dir()
    target = Path(config_dir) / "config.yaml"
    if target.exists() and not force:
        console.print(f"{target} already exists (use --force to overwrite)")
        sys.exit(1)
    path = save_settings(ctx.obj['settings'], config_dir)
    console.print(f"[green]✓[/green] Wrote {path}")


def main() -> None:
    """Main entry point."""
    try:
        cli()
    except KeyboardInterrupt:
        err_console.print("\n[yellow]Interrupted by user[/yellow]")
        sys.exit(130)


if __name__ == '__main__':
    main()
