"""Command-line entry point: prodsys check|index|powers."""
import logging
from enum import Enum
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from .errors import ConfigError, ProdsysError
from .experiments import ExperimentRunner, load_experiment, render_table, to_json, write_report
from .settings import load_config, load_settings

logger = logging.getLogger(__name__)
console = Console()

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

app = typer.Typer(name="prodsys", help="Inclusion systems, amalgamated products and index numerics.", add_completion=False)


class OutputFormat(str, Enum):
    json = "json"
    table = "table"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None, fmt: Optional[str] = None):
    """Rich console logging on stderr plus an optional file handler."""
    handlers = [RichHandler(rich_tracebacks=True, console=Console(stderr=True))]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(fmt or "%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
        handlers.append(file_handler)
    logging.basicConfig(level=level.upper(), format="%(message)s", handlers=handlers, force=True)


def _run(command: str, config: Path, out: Optional[Path], depth: Optional[int], tol: Optional[float], fmt: OutputFormat):
    settings = load_settings()
    try:
        base = load_config(settings.config_path)
        log_section = base.get('logging') or {}
        setup_logging(settings.log_level, log_section.get('file'), log_section.get('format'))
        experiment = load_experiment(str(config))
        runner = ExperimentRunner(experiment, settings, base, depth=depth, tol=tol)
        report = runner.run(command)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        console.print(f"[red]Configuration error: {e}[/red]")
        raise typer.Exit(code=EXIT_CONFIG)
    except ProdsysError as e:
        logger.error(f"{command} failed: {e}")
        console.print(f"[red]Error: {e}[/red]")
        raise typer.Exit(code=EXIT_FAIL)

    digits = int((base.get('report') or {}).get('float_digits', 12))
    if out is None:
        out = Path(settings.reports_path) / f"{experiment.name}_{command}.json"
    write_report(report, str(out), digits)
    if fmt == OutputFormat.json:
        typer.echo(to_json(report, digits), nl=False)
    else:
        render_table(report, console)
    if not report.passed:
        failed = ', '.join(report.summary.get('failed', [])) or '; '.join(report.errors) or 'index mismatch'
        logger.warning(f"{command}: FAILED ({failed})")
        raise typer.Exit(code=EXIT_FAIL)
    raise typer.Exit(code=EXIT_PASS)


CONFIG_OPTION = typer.Option(..., "--config", "-c", help="Experiment JSON file")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Write the JSON report here")
DEPTH_OPTION = typer.Option(None, "--depth", help="Override max refinement depth")
TOL_OPTION = typer.Option(None, "--tol", help="Override residual_eps (checks pass at 100x)")
FORMAT_OPTION = typer.Option(OutputFormat.table, "--format", help="Output format")


@app.command()
def check(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    depth: Optional[int] = DEPTH_OPTION,
    tol: Optional[float] = TOL_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
):
    """Check inclusion-system axioms, units, morphisms and correspondences."""
    _run('check', config, out, depth, tol, fmt)


@app.command()
def index(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    depth: Optional[int] = DEPTH_OPTION,
    tol: Optional[float] = TOL_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
):
    """Covariance kernel and index estimate of a unit set."""
    _run('index', config, out, depth, tol, fmt)


@app.command()
def powers(
    config: Path = CONFIG_OPTION,
    out: Optional[Path] = OUT_OPTION,
    depth: Optional[int] = DEPTH_OPTION,
    tol: Optional[float] = TOL_OPTION,
    fmt: OutputFormat = FORMAT_OPTION,
):
    """Compare the Powers semigroup with the amalgamated product."""
    _run('powers', config, out, depth, tol, fmt)


def main():
    app()


if __name__ == "__main__":
    main()
