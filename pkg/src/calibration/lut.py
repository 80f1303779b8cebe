"""
Weight-to-gray-level lookup tables: isotonic fit of a measured sweep, inversion,
flat-field gain equalization and sparse recalibration against drift.
"""
import logging
import math
from typing import Any, Iterable, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.optimize import isotonic_regression

from src.calibration.device import SlmDeviceModel, measure_response
from src.exceptions import CalibrationRangeError, DeadChannelError, DomainError
from src.hardware.quantizers import round_half_away

# Configure logger
logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]

DEFAULT_KNOTS = 2049

# Normalized intensity the sweep must reach at both ends
MIN_INTENSITY = 0.02
MAX_INTENSITY = 0.98


def default_grid(knots: int = DEFAULT_KNOTS) -> np.ndarray:
    return np.linspace(-1.0, 1.0, knots)


class WeightLut(BaseModel):
    """Gray level per weight knot, the fitted response it came from, and channel gains."""

    knots: Any
    table: Any
    fitted_intensity: Any
    peak: float
    gain_map: Any = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("knots")
    def check_knots(cls, v):
        v = np.asarray(v, dtype=float)
        if v[0] != -1.0 or v[-1] != 1.0 or np.any(np.diff(v) <= 0.0):
            raise ValueError("Knots must increase strictly from -1 to 1")
        return v

    @field_validator("table")
    def check_table(cls, v):
        v = np.asarray(v, dtype=np.int64)
        if np.any(np.diff(v) < 0):
            raise ValueError("LUT gray levels must be non-decreasing in w")
        return v

    @field_validator("fitted_intensity")
    def as_array(cls, v):
        return np.asarray(v, dtype=float)

    @property
    def gray_levels(self) -> int:
        return len(self.fitted_intensity)

    @property
    def knot_spacing(self) -> float:
        return 2.0 / (len(self.knots) - 1)

    def lookup(self, weights) -> np.ndarray:
        """Gray level for each weight via the nearest knot."""
        w = np.asarray(weights, dtype=float)
        if np.any(np.abs(w) > 1.0):
            raise DomainError("Weights must lie in [-1, 1]")
        index = round_half_away((w + 1.0) / self.knot_spacing).astype(np.int64)
        return self.table[np.clip(index, 0, len(self.knots) - 1)]

    def channel_gain(self, channel: int) -> float:
        return 1.0 if self.gain_map is None else float(self.gain_map[channel])

    def max_step(self, device: SlmDeviceModel, channel: int = 0) -> float:
        """Largest realised-weight change between adjacent gray levels."""
        levels = np.arange(device.gray_levels)
        return float(np.max(np.abs(np.diff(realized_weight(device, levels, channel, self.gain_map)))))


def realized_weight(device: SlmDeviceModel, gray, channel: int = 0, gain_map=None) -> np.ndarray:
    """Ground-truth weight 2 * gain * map * sin^2(phi(g)/2) - 1 produced by gray level(s)."""
    gain = device.pixel_gains[channel] * (1.0 if gain_map is None else gain_map[channel])
    return 2.0 * gain * np.sin(device.phase_response[np.asarray(gray)] / 2.0) ** 2 - 1.0


def _fit(samples: np.ndarray) -> np.ndarray:
    """Monotone non-decreasing least-squares fit (pool adjacent violators)."""
    return isotonic_regression(np.asarray(samples, dtype=float), increasing=True).x


def _invert(normalized: np.ndarray, knots: np.ndarray) -> np.ndarray:
    """Gray level per weight knot by linear interpolation of the fitted curve."""
    weights = 2.0 * normalized - 1.0
    # Plateaus of the isotonic fit collapse to their mean gray level
    values, inverse = np.unique(weights, return_inverse=True)
    levels = np.arange(len(weights), dtype=float)
    mean_level = np.bincount(inverse, weights=levels) / np.bincount(inverse)
    continuous = np.interp(knots, values, mean_level)
    table = round_half_away(continuous).astype(np.int64)
    return np.clip(table, 0, len(weights) - 1)


def build_lut(samples, target_grid=None, gain_map=None) -> WeightLut:
    """
    Fit a monotone response to a gray-level sweep and invert it.

    Args:
        samples: G measured intensities, index = gray level
        target_grid: Weight knots on [-1, 1], defaults to 2049 knots
        gain_map: Optional flat-field gains carried on the LUT

    Returns:
        WeightLut

    Raises:
        CalibrationRangeError: If the sweep does not span [0.02, 0.98] after normalization
    """
    knots = default_grid() if target_grid is None else np.asarray(target_grid, dtype=float)
    fitted = _fit(samples)

    peak = float(fitted[-1])
    if peak <= 0.0:
        raise CalibrationRangeError("Calibration sweep never rises above zero")
    normalized = fitted / peak
    if normalized[0] > MIN_INTENSITY or normalized[-1] < MAX_INTENSITY:
        raise CalibrationRangeError(
            f"Sweep spans [{normalized[0]:.3f}, {normalized[-1]:.3f}], need [{MIN_INTENSITY}, {MAX_INTENSITY}]"
        )

    table = _invert(normalized, knots)
    logger.debug(f"Built LUT over {len(knots)} knots from {len(fitted)} gray levels")
    return WeightLut(
        knots=knots,
        table=table,
        fitted_intensity=normalized,
        peak=peak,
        gain_map=None if gain_map is None else np.asarray(gain_map, dtype=float)
    )


def flat_field(
        device: SlmDeviceModel,
        channels: Optional[Iterable[int]] = None,
        noise_std: float = 0.0,
        seed: SeedLike = None,
        repeats: int = 1
) -> np.ndarray:
    """
    Equalize channel gains against the weakest channel.

    Args:
        device: Device under test
        channels: Channels to measure, defaults to all
        noise_std: Measurement noise std
        seed: Seed or generator for the noise
        repeats: Sweeps averaged per channel

    Returns:
        Gain map (one factor per measured channel) normalizing to the minimum-gain channel

    Raises:
        DeadChannelError: If a channel returns no light
    """
    channels = list(range(device.n_channels)) if channels is None else list(channels)
    if not channels:
        raise DomainError("Flat-field needs at least one channel")

    rng = np.random.default_rng(seed)
    full_on = []
    for channel in channels:
        sweeps = [measure_response(device, channel, noise_std, rng)[-1] for _ in range(repeats)]
        level = float(np.mean(sweeps))
        # Indistinguishable from measurement noise
        if level <= 5.0 * noise_std / math.sqrt(repeats):
            raise DeadChannelError(channel)
        full_on.append(level)

    full_on = np.asarray(full_on)
    gain_map = full_on.min() / full_on
    logger.info(f"Flat-field over {len(channels)} channels: gains {np.round(full_on, 4).tolist()}")
    return gain_map


def calibrate_device(
        device: SlmDeviceModel,
        noise_std: float = 0.0,
        repeats: int = 16,
        seed: SeedLike = None,
        channel: int = 0,
        target_grid=None
) -> WeightLut:
    """
    Full calibration: averaged sweeps, isotonic LUT and flat-field gain map.

    Args:
        device: Device under test
        noise_std: Measurement noise std per sweep
        repeats: Sweeps averaged before fitting
        seed: Seed or generator for the measurement noise
        channel: Channel whose sweep defines the shared LUT
        target_grid: Weight knots, defaults to 2049 knots

    Returns:
        WeightLut carrying the gain map of every channel
    """
    rng = np.random.default_rng(seed)
    sweeps = np.mean([measure_response(device, channel, noise_std, rng) for _ in range(repeats)], axis=0)
    gain_map = flat_field(device, noise_std=noise_std, seed=rng, repeats=repeats)
    lut = build_lut(sweeps, target_grid, gain_map=gain_map)
    logger.info(f"Calibrated {device.gray_levels}-level SLM over {len(lut.knots)} knots")
    return lut


def calibration_residuals(lut: WeightLut, device: SlmDeviceModel, channel: int = 0) -> dict:
    """
    Compare the LUT against the ground-truth device.

    Returns:
        Dictionary with max/mean absolute weight error and the largest LUT step
    """
    error = np.abs(realized_weight(device, lut.table, channel) - lut.knots)
    return {
        "max_abs_error": float(error.max()),
        "mean_abs_error": float(error.mean()),
        "max_lut_step": lut.max_step(device, channel),
        "knots": int(len(lut.knots)),
        "gray_levels": int(device.gray_levels),
    }


def recalibrate(
        device: SlmDeviceModel,
        lut: WeightLut,
        subset_fraction: float,
        noise_std: float = 0.0,
        seed: SeedLike = None,
        channel: int = 0
) -> WeightLut:
    """
    Re-measure a pseudo-random subset of gray levels and refit drifted knots.

    A knot counts as drifted when the re-estimated response at its gray level moved by
    more than twice the knot spacing (in weight units). Other knots keep their gray level.

    Args:
        device: Device in its current (possibly drifted) state
        lut: LUT to update
        subset_fraction: Fraction of gray levels re-measured, in (0, 1]
        noise_std: Measurement noise std
        seed: Seed or generator selecting the subset and drawing noise
        channel: Channel to measure

    Returns:
        Updated WeightLut (the input LUT itself when nothing drifted)
    """
    if not 0.0 < subset_fraction <= 1.0:
        raise DomainError(f"subset_fraction must lie in (0, 1], got {subset_fraction}")

    rng = np.random.default_rng(seed)
    levels = lut.gray_levels

    if subset_fraction == 1.0:
        samples = measure_response(device, channel, noise_std, rng)
        logger.info("Recalibration over every gray level: rebuilding LUT")
        return build_lut(samples, lut.knots, gain_map=lut.gain_map)

    count = max(2, math.ceil(subset_fraction * levels))
    subset = np.union1d(rng.choice(levels, size=count, replace=False), [0, levels - 1])
    measured = measure_response(device, channel, noise_std, rng)[subset] / lut.peak

    # Smooth drift: interpolate the correction between re-measured levels
    correction = np.interp(np.arange(levels), subset, measured - lut.fitted_intensity[subset])
    updated = _fit(lut.fitted_intensity + correction)

    residual = 2.0 * np.abs(updated[lut.table] - lut.fitted_intensity[lut.table])
    drifted = residual > 2.0 * lut.knot_spacing
    if not np.any(drifted):
        logger.info(f"Recalibration of {len(subset)} gray levels found no drift")
        return lut

    table = np.where(drifted, _invert(updated, lut.knots), lut.table)
    table = np.maximum.accumulate(table)
    logger.warning(f"Recalibration refit {int(drifted.sum())} of {len(lut.knots)} knots")

    return lut.model_copy(update={"table": table, "fitted_intensity": updated})
