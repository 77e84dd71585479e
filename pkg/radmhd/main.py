"""Command-line entry point: ``python -m radmhd.main <command>``."""
import logging
import sys
from pathlib import Path
from typing import List, Optional

import click

from . import __version__
from .core.config import settings
from .core.errors import ConfigError, ConvergenceLevelsError, DomainError, MmsSelfCheckError, SimulationError
from .models.diagnostics import AuditTolerances
from .models.physics import PhysParams
from .services.config_parser import load_config
from .services.diagnostics import check_estimates
from .services.mms_verification import MMS_CASES, run_convergence
from .services.output import read_timeseries, write_convergence
from .services.simulation import SimulationService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3


def _parse_levels(ctx, param, value: str) -> List[int]:
    try:
        levels = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got {value!r}")
    if len(levels) < 1:
        raise click.BadParameter("at least one level is required")
    return levels


@click.group()
@click.option("--log-level", default=None, help="Overrides RADMHD_LOG_LEVEL.")
def cli(log_level: Optional[str]):
    """Free-boundary radiative MHD simulator."""
    logging.basicConfig(
        level=(log_level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_dir", default=None, type=click.Path(path_type=Path))
def run(config_path: Path, out_dir: Optional[Path]):
    """Simulate one experiment and write its CSVs and audit report."""
    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config error in {config_path}:", err=True)
        for issue in exc.issues:
            click.echo(f"  {issue}", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        result = SimulationService(config).run(out_dir)
    except ConfigError as exc:
        click.echo(f"config error in {config_path}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except SimulationError as exc:
        click.echo(f"simulation aborted: {exc}", err=True)
        sys.exit(EXIT_ABORT)

    click.echo(result.report.render(), nl=False)
    for name, path in result.paths.items():
        click.echo(f"{name}: {path}")
    sys.exit(EXIT_OK)


@cli.command()
@click.option("--case", "case_name", required=True, type=click.Choice(sorted(MMS_CASES)))
@click.option("--levels", required=True, callback=_parse_levels, help="e.g. 32,64,128")
@click.option("--t-final", default=0.05, show_default=True, type=float)
@click.option("--out", "out_dir", default=None, type=click.Path(path_type=Path))
def mms(case_name: str, levels: List[int], t_final: float, out_dir: Optional[Path]):
    """Manufactured-solution convergence study."""
    out_dir = Path(out_dir if out_dir is not None else settings.OUTPUT_DIR)
    try:
        table = run_convergence(MMS_CASES[case_name], levels, t_final, PhysParams())
    except ConvergenceLevelsError as exc:
        click.echo(f"invalid levels: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except DomainError as exc:
        click.echo(f"simulation aborted: physics evaluated outside its domain: {exc}", err=True)
        sys.exit(EXIT_ABORT)
    except MmsSelfCheckError as exc:
        click.echo(f"manufactured-solution self-check failed: {exc}", err=True)
        sys.exit(EXIT_CHECK_FAILED)
    except SimulationError as exc:
        click.echo(f"simulation aborted: {exc}", err=True)
        sys.exit(EXIT_ABORT)

    path = write_convergence(out_dir / "convergence.csv", table)
    for row in table.rows:
        order = "-" if row.observed_order is None else f"{row.observed_order:.3f}"
        click.echo(f"N={row.N:<5d} {row.field:<6s} L2={row.L2_error:.6e} Linf={row.Linf_error:.6e} order={order}")
    click.echo(f"convergence: {path}")
    failures = table.failures()
    for row in failures:
        click.echo(f"order below threshold: {row.field} at N={row.N}: {row.observed_order:.3f}", err=True)
    sys.exit(EXIT_CHECK_FAILED if failures else EXIT_OK)


@cli.command()
@click.option("--timeseries", "timeseries_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--tol-energy", default=None, type=float)
@click.option("--tol-entropy", default=None, type=float)
def audit(timeseries_path: Path, tol_energy: Optional[float], tol_entropy: Optional[float]):
    """Re-run the estimate checks on an existing timeseries.csv."""
    overrides = {}
    if tol_energy is not None:
        overrides["energy"] = tol_energy
    if tol_entropy is not None:
        overrides["entropy_slack"] = tol_entropy
    try:
        series = read_timeseries(timeseries_path)
        report = check_estimates(series, AuditTolerances(**overrides))
    except ValueError as exc:
        click.echo(f"cannot audit {timeseries_path}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(report.render(), nl=False)
    sys.exit(EXIT_OK if report.passed else EXIT_CHECK_FAILED)


@cli.command()
def version():
    click.echo(f"{settings.PROJECT_NAME} {__version__}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name=settings.PROJECT_NAME, standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
