import functools
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

import click
from pydantic import ValidationError

from app.core.config import Settings
from app.core.config import settings as default_settings
from app.core.exceptions import EnergyClockError, VerificationFailedError
from app.core.logging_config import configure_logging
from app.schemas.experiment import ExperimentConfig, RunRow, Table1Row, VerifyRow
from app.schemas.records import UncertaintyRow
from app.services.sweeps import SweepService
from app.utils.serialization import write_field, write_rows_csv, write_sidecar

logger = logging.getLogger("app.main")

DEFAULT_OUTPUT_DIR = Path("results")
EXIT_CONFIG_INVALID = 2


def resolve_output_dir(out: Optional[Path], settings: Settings, config: ExperimentConfig) -> Path:
    """--out, then ENERGYCLOCK_OUTPUT_DIR, then [output].directory, then ./results."""
    for candidate in (out, settings.output_dir, config.output.directory):
        if candidate is not None:
            return Path(candidate)
    return DEFAULT_OUTPUT_DIR


def handle_errors(fn: Callable) -> Callable:
    """Turn library errors into the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EnergyClockError as e:
            click.echo(f"error: {e.detail}", err=True)
            sys.exit(e.exit_code)
        except ValidationError as e:
            click.echo(f"error: invalid configuration: {e}", err=True)
            sys.exit(EXIT_CONFIG_INVALID)

    return wrapper


def run_options(fn: Callable) -> Callable:
    fn = click.option("--jobs", type=click.IntRange(min=1), default=None, help="Worker threads for rows.")(fn)
    fn = click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None, help="Output dir.")(fn)
    fn = click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False, path_type=Path),
        required=True,
        help="Experiment TOML file.",
    )(fn)
    return fn


class RunContext:
    def __init__(self, settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int]):
        self.settings = settings
        self.config = ExperimentConfig.from_toml(config_path)
        self.out_dir = resolve_output_dir(out, settings, self.config)
        self.jobs = jobs or settings.default_jobs
        logger.info("config %s -> %s (%d jobs)", config_path, self.out_dir, self.jobs)


@click.group()
@click.option("--log-level", default=None, help="Overrides ENERGYCLOCK_LOG_LEVEL.")
@click.version_option(version=default_settings.app_version, prog_name=default_settings.app_name)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str]) -> None:
    """Internal total-energy measurement models: read-outs, regimes and verification."""
    settings = Settings()
    configure_logging(log_level or settings.log_level)
    ctx.obj = settings


@cli.command()
@run_options
@click.pass_obj
@handle_errors
def verify(settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int]) -> None:
    """Check the exact solutions against the finite-difference eigen-residual."""
    run = RunContext(settings, config_path, out, jobs)
    rows = SweepService.verify(run.config, run.jobs)
    write_rows_csv(run.out_dir / "verify.csv", VerifyRow, rows)
    write_sidecar(run.out_dir / "verify.json", run.config)

    for row in rows:
        status = "ok" if row.passed else "FAIL"
        click.echo(
            f"{row.model.value:>2} {row.amplitude:<12} q={row.q:<6g} "
            f"residual={row.finest_residual:.3e} order={row.fitted_order:.2f} {status}"
            + ("" if row.gated else " (not gated)")
        )
    failed = [row for row in rows if row.gated and not row.passed]
    if failed:
        raise VerificationFailedError(f"{len(failed)} of {len(rows)} checks failed")


@cli.command()
@run_options
@click.pass_obj
@handle_errors
def regimes(settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int]) -> None:
    """AR energy sweep through the near-saturating and dispersive regimes."""
    run = RunContext(settings, config_path, out, jobs)
    rows = SweepService.regimes(run.config, run.jobs)
    write_rows_csv(run.out_dir / "regimes.csv", RunRow, rows)
    write_sidecar(run.out_dir / "regimes.json", run.config)
    click.echo(f"{len(rows)} rows -> {run.out_dir / 'regimes.csv'}")


@cli.command()
@run_options
@click.pass_obj
@handle_errors
def table1(settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int]) -> None:
    """Precision/duration relations case by case."""
    run = RunContext(settings, config_path, out, jobs)
    rows = SweepService.table1(run.config, run.jobs)
    write_rows_csv(run.out_dir / "table1.csv", Table1Row, rows)
    write_sidecar(run.out_dir / "table1.json", run.config, rows=[row.model_dump(mode="json") for row in rows])
    click.echo(f"{len(rows)} rows -> {run.out_dir / 'table1.csv'}")


@cli.command()
@run_options
@click.option(
    "--dump-field",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the post-measurement pointer field (.txt or .npz).",
)
@click.pass_obj
@handle_errors
def measure(
    settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int], dump_field: Optional[Path]
) -> None:
    """Single read-out; prints the measurement record as JSON."""
    run = RunContext(settings, config_path, out, jobs)
    record, field = SweepService.measure(run.config)
    if dump_field is not None:
        write_field(dump_field, field)
    click.echo(record.model_dump_json(indent=2))


@cli.command(name="text-stats")
@run_options
@click.pass_obj
@handle_errors
def text_stats(settings: Settings, config_path: Path, out: Optional[Path], jobs: Optional[int]) -> None:
    """External-duration statistics and the uncertainty products (MP model)."""
    run = RunContext(settings, config_path, out, jobs)
    stats, summary = SweepService.text_stats(run.config, run.jobs)
    write_rows_csv(run.out_dir / "text_stats.csv", UncertaintyRow, summary.rows)
    write_sidecar(run.out_dir / "text_stats.json", run.config, summary=summary)
    if len(stats) == 1:
        click.echo(stats[0].model_dump_json(indent=2))
    else:
        click.echo(summary.model_dump_json(indent=2, exclude={"rows"}))


if __name__ == "__main__":
    cli()
