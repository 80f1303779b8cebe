"""
Entry point of the fastonn command-line tool.
"""
import json
import logging
from pathlib import Path
from typing import Optional

import click

from config.settings import TOOL_VERSION
from src.cli.analysis import calibrate, energy_report, snr_curve
from src.cli.common import MANIFEST_NAME, setup_logging
from src.cli.hardware import edge_detect, mvm_bench
from src.cli.network import infer, noise_sweep, train
from src.exceptions import FastOnnError
from src.schemas.experiment import ExperimentConfig, RunManifest

# Configure logger
logger = logging.getLogger(__name__)


@click.group()
@click.version_option(TOOL_VERSION, prog_name="fastonn")
def cli():
    """Desk-scale simulator of a free-space optical matrix-vector accelerator."""


# Register commands
cli.add_command(mvm_bench)
cli.add_command(edge_detect)
cli.add_command(train)
cli.add_command(infer)
cli.add_command(noise_sweep)
cli.add_command(snr_curve)
cli.add_command(energy_report)
cli.add_command(calibrate)


@cli.command("replay")
@click.argument("manifest", type=click.Path(exists=True))
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Output directory, defaults to the manifest's directory")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
              default=None)
@click.option("--quiet", is_flag=True, default=False)
@click.pass_context
def replay(ctx, manifest: str, out: Optional[str], log_level: Optional[str], quiet: bool):
    """Re-run the command recorded in a manifest with its resolved config and seed."""
    setup_logging(log_level, quiet)
    path = Path(manifest)
    if path.is_dir():
        path = path / MANIFEST_NAME

    try:
        recorded = RunManifest(**json.loads(path.read_text()))
        config = ExperimentConfig.from_dict(recorded.config, source=str(path))
    except (OSError, ValueError, FastOnnError) as e:
        detail = e.detail if isinstance(e, FastOnnError) else str(e).splitlines()[0]
        click.echo(f"error: {path}: {detail}", err=True)
        ctx.exit(1)

    command = cli.get_command(ctx, recorded.command)
    if command is None or recorded.command == "replay":
        click.echo(f"error: {path}: cannot replay command '{recorded.command}'", err=True)
        ctx.exit(1)

    if recorded.tool_version != TOOL_VERSION:
        logger.warning(f"Manifest was written by version {recorded.tool_version}, running {TOOL_VERSION}")

    logger.info(f"Replaying {recorded.command} from {path}")
    ctx.obj = {"config": config}
    ctx.invoke(
        command,
        **recorded.options,
        config=None,
        seed=recorded.seed,
        out=out or str(path.parent),
        log_level=log_level,
        quiet=quiet,
    )


def main():
    cli()


if __name__ == "__main__":
    main()
