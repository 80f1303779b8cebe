"""
Hardware configuration for the simulated optical MVM core.
Geometry (N VCSELs, M fanout copies), clock rate, converter depths and optical imperfections.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.exceptions import ConfigError

# Configure logger
logger = logging.getLogger(__name__)


class HardwareConfig(BaseSettings):
    """Geometry and electrical parameters of the simulated system."""

    # Geometry: N inputs (VCSELs), M kernel copies
    n_inputs: int = Field(default=9, ge=1)
    n_fanout: int = Field(default=9, ge=1)

    # Samples per second
    clock_rate: float = Field(default=1e8, gt=0)

    # Optical power of one VCSEL at full drive (watts)
    max_power_per_vcsel: float = Field(default=1e-3, gt=0)

    # Converter depths; None models an ideal converter
    dac_bits: Optional[int] = 8
    adc_bits: Optional[int] = 10

    # Nearest-neighbour leakage between beams on the SLM
    crosstalk: float = Field(default=0.0, ge=0.0, le=0.2)

    # Per-copy DOE efficiency, defaults to all ones
    fanout_efficiencies: Optional[List[float]] = None

    # Fraction of the power sent to the reference arm
    reference_split: float = Field(default=0.5, gt=0.0, lt=1.0)

    model_config = SettingsConfigDict(
        env_prefix="FASTONN_HW_",
        env_file=".env",
        extra="ignore"
    )

    @field_validator("dac_bits", "adc_bits")
    def check_bits(cls, v):
        """Converter depths must lie in [1, 16]"""
        if v is not None and not 1 <= v <= 16:
            raise ValueError(f"Converter depth must be in [1, 16], got {v}")
        return v

    @field_validator("fanout_efficiencies")
    def check_efficiencies(cls, v):
        """Every efficiency must lie in (0, 1]"""
        if v is not None and any(not 0.0 < e <= 1.0 for e in v):
            raise ValueError("Fanout efficiencies must lie in (0, 1]")
        return v

    @model_validator(mode="after")
    def fill_efficiencies(self):
        if self.fanout_efficiencies is None:
            self.fanout_efficiencies = [1.0] * self.n_fanout
        elif len(self.fanout_efficiencies) != self.n_fanout:
            raise ValueError(
                f"Expected {self.n_fanout} fanout efficiencies, got {len(self.fanout_efficiencies)}"
            )
        return self

    @property
    def efficiencies(self) -> np.ndarray:
        return np.asarray(self.fanout_efficiencies, dtype=float)

    @property
    def full_scale(self) -> float:
        """Largest possible |dot product|, the ADC half range."""
        return float(self.n_inputs)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "HardwareConfig":
        """
        Load a hardware configuration from a JSON file.

        Args:
            path: File whose keys are exactly the HardwareConfig field names

        Returns:
            HardwareConfig: Validated configuration

        Raises:
            ConfigError: On unknown keys or invalid values
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})")

        unknown = set(data) - set(cls.model_fields)
        if unknown:
            raise ConfigError(f"{path}: unknown hardware keys {sorted(unknown)}")

        try:
            config = cls(**data)
        except ValidationError as e:
            raise ConfigError(f"{path}: {e.errors()[0]['msg']}")

        logger.info(f"Loaded hardware config from {path}: N={config.n_inputs}, M={config.n_fanout}")
        return config


def get_hardware_config(**overrides) -> HardwareConfig:
    """
    Get a hardware configuration with optional overrides.

    Args:
        **overrides: Field values to override defaults

    Returns:
        HardwareConfig with overrides applied
    """
    try:
        return HardwareConfig(**overrides)
    except ValidationError as e:
        raise ConfigError(f"Invalid hardware config: {e.errors()[0]['msg']}")
