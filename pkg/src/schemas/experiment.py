"""
Experiment configuration shared by every CLI command, and the run manifest.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config.settings import DEFAULT_SEED
from src.analysis.params import EnergyParams, GeometryParams
from src.convnet.config import TrainConfig
from src.exceptions import ConfigError
from src.hardware.config import HardwareConfig
from src.noise.params import NoiseParams

# Configure logger
logger = logging.getLogger(__name__)


class CalibrationSettings(BaseModel):
    """SLM device model and measurement settings of the calibrate command."""

    gray_levels: int = Field(default=256, ge=2)
    n_channels: int = Field(default=9, ge=1)
    perturbation: float = Field(default=0.1, ge=0.0)
    pixel_gains: Optional[list] = None
    noise_std: float = Field(default=0.01, ge=0.0)
    repeats: int = Field(default=16, ge=1)
    knots: int = Field(default=2049, ge=2)
    phase_offset: float = 0.0
    subset_fraction: Optional[float] = Field(default=None, gt=0.0, le=1.0)

    model_config = ConfigDict(extra="forbid")


class ExperimentConfig(BaseModel):
    """
    Fully resolved parameters of one run.

    Every section is optional in the input file and takes its defaults when missing.
    ``energy`` and ``geometry`` stay None until a command resolves them from a preset.
    """

    seed: int = Field(default=DEFAULT_SEED, ge=0)
    out: str = "."
    hardware: HardwareConfig = Field(default_factory=HardwareConfig)
    noise: NoiseParams = Field(default_factory=NoiseParams)
    training: TrainConfig = Field(default_factory=TrainConfig)
    calibration: CalibrationSettings = Field(default_factory=CalibrationSettings)
    energy: Optional[EnergyParams] = None
    geometry: Optional[GeometryParams] = None

    model_config = ConfigDict(extra="forbid")

    @field_validator("hardware", "training", mode="before")
    def build_settings(cls, v, info):
        """Build the env-aware sections explicitly so FASTONN_* variables apply to them."""
        if not isinstance(v, dict):
            return v
        section = HardwareConfig if info.field_name == "hardware" else TrainConfig
        try:
            return section(**v)
        except ValidationError as e:
            error = e.errors()[0]
            raise ValueError(f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        Load a JSON experiment file.

        Raises:
            ConfigError: Unreadable file, invalid JSON or invalid values
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except OSError as e:
            raise ConfigError(f"{path}: cannot read config ({e.strerror})")
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})")
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(data, source=str(path))

    @classmethod
    def from_dict(cls, data: Dict[str, Any], source: str = "config") -> "ExperimentConfig":
        try:
            config = cls(**data)
        except ValidationError as e:
            error = e.errors()[0]
            location = ".".join(str(part) for part in error["loc"])
            raise ConfigError(f"{source}: {location}: {error['msg']}")
        logger.debug(f"Resolved experiment config from {source}")
        return config

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Copy with the global seed also driving the training section."""
        return self.model_copy(update={
            "seed": seed,
            "training": self.training.model_copy(update={"seed": seed}),
        })

    def resolved(self) -> Dict[str, Any]:
        """JSON-ready dump including every default."""
        return self.model_dump(mode="json", exclude={"out"})


class RunManifest(BaseModel):
    """Everything needed to replay a run: command, its options, the resolved config and versions."""

    command: str
    options: Dict[str, Any]
    seed: int
    config: Dict[str, Any]
    tool_version: str
    numpy_version: str

    model_config = ConfigDict(extra="forbid")
