"""
Ground-truth model of an imperfect phase-only SLM behind a polarizing beam splitter.
"""
import logging
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.exceptions import DimensionError

# Configure logger
logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]

# Endpoint tolerance of the phase response (radians)
ENDPOINT_TOLERANCE = 0.05
GAIN_RANGE = (0.8, 1.2)


class SlmDeviceModel(BaseModel):
    """
    Phase response phi(g) per gray level plus per-channel reflection gains.

    A gain of exactly 0 marks a dead channel; every other gain must be near unity.
    """

    gray_levels: int = Field(default=256, ge=2)
    phase_response: Any
    pixel_gains: Any

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("phase_response")
    def check_phase_response(cls, v):
        v = np.asarray(v, dtype=float)
        if v.ndim != 1:
            raise ValueError("Phase response must be a 1-D table")
        if np.any(np.diff(v) < 0.0):
            raise ValueError("Phase response must be non-decreasing")
        if abs(v[0]) > ENDPOINT_TOLERANCE + 1e-12 or v[-1] < np.pi - ENDPOINT_TOLERANCE - 1e-12:
            raise ValueError("Phase response must span roughly [0, pi]")
        return v

    @field_validator("pixel_gains")
    def check_gains(cls, v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        live = v[v != 0.0]
        if np.any(live < GAIN_RANGE[0]) or np.any(live > GAIN_RANGE[1]):
            raise ValueError(f"Channel gains must lie in {list(GAIN_RANGE)} (or be 0 for a dead channel)")
        return v

    @model_validator(mode="after")
    def check_table_length(self):
        if len(self.phase_response) != self.gray_levels:
            raise ValueError(f"Phase table has {len(self.phase_response)} entries, expected {self.gray_levels}")
        return self

    @classmethod
    def default(
            cls,
            gray_levels: int = 256,
            n_channels: int = 9,
            perturbation: float = 0.1,
            pixel_gains: Optional[Sequence[float]] = None
    ) -> "SlmDeviceModel":
        """
        Device with phi(g) = pi g/(G-1) + a sin(2 pi g/(G-1)).

        Args:
            gray_levels: Number of drive levels G
            n_channels: Number of fanout channels
            perturbation: Amplitude a of the smooth nonlinearity (radians)
            pixel_gains: Per-channel gains, defaults to ones

        Returns:
            SlmDeviceModel
        """
        ramp = np.arange(gray_levels) / (gray_levels - 1)
        phases = np.pi * ramp + perturbation * np.sin(2.0 * np.pi * ramp)
        gains = np.ones(n_channels) if pixel_gains is None else pixel_gains
        return cls(gray_levels=gray_levels, phase_response=phases, pixel_gains=gains)

    @classmethod
    def linear(cls, gray_levels: int = 256, n_channels: int = 1) -> "SlmDeviceModel":
        """Ideal device with a linear phase ramp."""
        return cls.default(gray_levels=gray_levels, n_channels=n_channels, perturbation=0.0)

    def with_phase_offset(self, offset: float) -> "SlmDeviceModel":
        """Copy of the device whose phase response drifted by a constant offset."""
        return self.model_copy(update={"phase_response": self.phase_response + offset})

    def with_gains(self, gains: Sequence[float]) -> "SlmDeviceModel":
        return SlmDeviceModel(
            gray_levels=self.gray_levels,
            phase_response=self.phase_response,
            pixel_gains=gains
        )

    @property
    def n_channels(self) -> int:
        return len(self.pixel_gains)

    def intensity(self, channel: int = 0) -> np.ndarray:
        """Noiseless reflected intensity gain * sin^2(phi(g)/2) over all gray levels."""
        if not 0 <= channel < self.n_channels:
            raise DimensionError(f"Channel {channel} outside 0..{self.n_channels - 1}")
        return self.pixel_gains[channel] * np.sin(self.phase_response / 2.0) ** 2


def measure_response(
        device: SlmDeviceModel,
        channel: int = 0,
        noise_std: float = 0.0,
        seed: SeedLike = None
) -> np.ndarray:
    """
    Sweep every gray level and record the reflected intensity.

    Args:
        device: Device under test
        channel: Fanout channel to measure
        noise_std: Std of additive Gaussian measurement noise
        seed: Seed or generator for the noise

    Returns:
        G intensity samples
    """
    samples = device.intensity(channel)
    if noise_std > 0.0:
        rng = np.random.default_rng(seed)
        samples = samples + rng.standard_normal(samples.shape) * noise_std
    return samples
