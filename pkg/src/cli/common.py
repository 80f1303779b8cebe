"""
Shared CLI plumbing: common options, logging setup, run context, error mapping and manifests.
"""
import json
import logging
import sys
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Tuple

import click
import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from config import settings
from src.calibration.device import SlmDeviceModel
from src.calibration.lut import WeightLut, calibrate_device, default_grid
from src.exceptions import ConfigError, FastOnnError
from src.schemas.experiment import CalibrationSettings, ExperimentConfig, RunManifest
from src.seeds import substream

# Configure logger
logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
COMMON_OPTIONS = ("config", "seed", "out", "log_level", "quiet")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: Optional[str] = None, quiet: bool = False) -> None:
    """Configure the root logger once per process."""
    level = (level or settings.LOG_LEVEL).upper()
    if quiet and level in ("DEBUG", "INFO"):
        level = "WARNING"
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT, force=True)


def common_options(func):
    """--config, --seed, --out, --log-level and --quiet for every experiment command."""
    options = [
        click.option("--config", "config", type=click.Path(dir_okay=False), default=None,
                     help="JSON experiment config"),
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Base random seed"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory"),
        click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
                     default=None, help="Logging level"),
        click.option("--quiet", is_flag=True, default=False, help="Suppress progress bars and info logs"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


class RunContext(BaseModel):
    """Resolved state of one command invocation."""

    command: str
    options: Dict[str, Any]
    config: ExperimentConfig
    out_dir: Path
    quiet: bool = False

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def progress(self) -> bool:
        return not self.quiet and sys.stderr.isatty()

    def path(self, name: str) -> Path:
        return self.out_dir / name


def write_json(path: Path, payload: Dict[str, Any]) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote {path}")
    return path


def slm_device(calibration: CalibrationSettings) -> SlmDeviceModel:
    """Ground-truth SLM described by the calibration section."""
    return SlmDeviceModel.default(
        gray_levels=calibration.gray_levels,
        n_channels=calibration.n_channels,
        perturbation=calibration.perturbation,
        pixel_gains=calibration.pixel_gains,
    )


def calibrated_slm(run: RunContext) -> Tuple[SlmDeviceModel, WeightLut]:
    """
    Build the configured SLM and calibrate it on the calibration-noise stream.

    Returns:
        Tuple (device, lut); the LUT carries the flat-field gain map
    """
    calibration = run.config.calibration
    device = slm_device(calibration)
    lut = calibrate_device(
        device,
        calibration.noise_std,
        calibration.repeats,
        substream(run.seed, "calibration-noise"),
        target_grid=default_grid(calibration.knots),
    )
    return device, lut


def emit_manifest(run: RunContext) -> Path:
    """
    Write manifest.json: command, options, resolved config, seed and versions.

    Raises:
        OSError: Unwritable output directory
    """
    manifest = RunManifest(
        command=run.command,
        options=run.options,
        seed=run.seed,
        config=run.config.resolved(),
        tool_version=settings.TOOL_VERSION,
        numpy_version=np.__version__,
    )
    return write_json(run.path(MANIFEST_NAME), manifest.model_dump(mode="json"))


def _resolve_config(config_path: Optional[str], seed: Optional[int]) -> ExperimentConfig:
    ctx = click.get_current_context(silent=True)
    preset = (ctx.obj or {}).get("config") if ctx is not None else None

    if preset is not None:
        config = preset
    elif config_path is not None:
        config = ExperimentConfig.from_file(config_path)
    else:
        config = ExperimentConfig()
    return config.with_seed(config.seed if seed is None else seed)


def _fail(message: str) -> None:
    logger.error(message)
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@contextmanager
def experiment(command: str, params: Dict[str, Any]) -> Iterator[RunContext]:
    """
    Run a command body with a resolved context and write the manifest on success.

    FastOnnError, pydantic ValidationError and OSError end the process with exit code 1
    and a one-line diagnostic on stderr.
    """
    setup_logging(params.get("log_level"), params.get("quiet", False))
    options = {k: v for k, v in params.items() if k not in COMMON_OPTIONS}

    try:
        config = _resolve_config(params.get("config"), params.get("seed"))
        out_dir = Path(params.get("out") or config.out or settings.DEFAULT_OUTPUT_DIR)
        if not out_dir.is_dir():
            raise ConfigError(f"Output directory {out_dir} does not exist")
        config = config.model_copy(update={"out": str(out_dir)})

        run = RunContext(
            command=command,
            options=options,
            config=config,
            out_dir=out_dir,
            quiet=params.get("quiet", False),
        )
        logger.info(f"Running {command} with seed {run.seed}, writing to {out_dir}")
        yield run
        emit_manifest(run)
    except FastOnnError as e:
        _fail(e.detail)
    except ValidationError as e:
        error = e.errors()[0]
        _fail(f"invalid {'.'.join(str(p) for p in error['loc'])}: {error['msg']}")
    except OSError as e:
        _fail(f"{e.filename or ''}: {e.strerror or e}".lstrip(": "))


def experiment_command(name: str):
    """Decorate a click command body so it runs inside experiment()."""
    def decorator(func):
        @wraps(func)
        def wrapper(**params):
            with experiment(name, params) as run:
                func(run, **{k: v for k, v in params.items() if k not in COMMON_OPTIONS})
        return wrapper
    return decorator
