"""
One optical clock cycle: DOE fanout, SLM polarization weighting, intensity accumulation
and balanced detection followed by the ADC.
"""
import logging
from typing import TYPE_CHECKING, Any, Iterator, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.exceptions import DimensionError
from src.hardware.config import HardwareConfig
from src.hardware.encoding import InputFrame, phase_to_weight, weight_to_phase
from src.hardware.quantizers import adc_dequantize, adc_quantize, dac_step
from src.noise.params import NoiseParams
from src.noise.snr import arm_noise_std
from src.seeds import frame_rng

if TYPE_CHECKING:
    from src.calibration.device import SlmDeviceModel
    from src.calibration.lut import WeightLut

# Configure logger
logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]

# Slack on the [0, pi] phase range for float round-off
_PHASE_TOL = 1e-9


class WeightPlane(BaseModel):
    """
    Signed M x N weights and the SLM phases that realise them.

    ``gains`` scales the reflected intensity of each copy (SLM channel gain times the
    flat-field correction); None means unit gain everywhere.
    """

    weights: Any
    phases: Any
    gains: Any = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("weights")
    def check_weights(cls, v):
        v = np.asarray(v, dtype=float)
        if v.ndim != 2:
            raise ValueError("Weights must be an M x N matrix")
        if np.any(np.abs(v) > 1.0):
            raise ValueError("Weights must lie in [-1, 1]")
        return v

    @field_validator("phases")
    def check_phases(cls, v):
        v = np.asarray(v, dtype=float)
        if np.any(v < -_PHASE_TOL) or np.any(v > np.pi + _PHASE_TOL):
            raise ValueError("Phases must lie in [0, pi]")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        if self.weights.shape != self.phases.shape:
            raise ValueError(f"Weights {self.weights.shape} and phases {self.phases.shape} differ in shape")
        if self.gains is not None and np.asarray(self.gains).shape != (self.weights.shape[0],):
            raise ValueError(f"Expected one gain per copy ({self.weights.shape[0]}), got {np.shape(self.gains)}")
        return self

    @classmethod
    def ideal(cls, weights) -> "WeightPlane":
        """Plane driven with the closed-form phases arccos(-w)."""
        weights = np.asarray(weights, dtype=float)
        return cls(weights=weights, phases=np.asarray(weight_to_phase(weights)))

    @classmethod
    def from_lut(cls, weights, lut: "WeightLut", device: "SlmDeviceModel") -> "WeightPlane":
        """
        Plane driven through a calibrated LUT on a (possibly imperfect) SLM.

        Copy m sits on SLM channel m, so its intensity carries that channel's gain times
        the LUT's flat-field factor.

        Raises:
            DimensionError: The device has fewer channels than the plane has copies
        """
        weights = np.asarray(weights, dtype=float)
        copies = weights.shape[0]
        if device.n_channels < copies:
            raise DimensionError(f"SLM has {device.n_channels} channels, the plane needs {copies}")
        gains = device.pixel_gains[:copies] * np.array([lut.channel_gain(m) for m in range(copies)])
        gray = lut.lookup(weights)
        return cls(weights=weights, phases=device.phase_response[gray], gains=gains)

    @property
    def shape(self):
        return self.weights.shape

    @property
    def transmission(self) -> np.ndarray:
        """Signal-arm transmission gain * sin^2(phi/2)."""
        transmission = np.sin(self.phases / 2.0) ** 2
        if self.gains is None:
            return transmission
        return np.asarray(self.gains, dtype=float)[:, np.newaxis] * transmission

    @property
    def realized_weights(self) -> np.ndarray:
        if self.gains is None:
            return phase_to_weight(self.phases)
        return 2.0 * self.transmission - 1.0


class DetectorReadout(BaseModel):
    """
    Differential outputs of the balanced detectors.

    ``analog`` and ``digital`` have a trailing axis of length M; a leading frame axis is
    present for batch readouts.
    """

    analog: Any
    digital: Any
    full_scale: float
    adc_bits: Optional[int] = None
    seed_used: Optional[int] = None

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    def dequantized(self) -> np.ndarray:
        """Values the ADC delivers, on the analog scale (analog itself for an ideal ADC)."""
        if self.adc_bits is None:
            return self.analog
        return adc_dequantize(self.digital, self.full_scale, self.adc_bits)

    def __len__(self) -> int:
        return 1 if self.analog.ndim == 1 else self.analog.shape[0]

    def frames(self) -> Iterator["DetectorReadout"]:
        """Iterate per-frame readouts of a batch."""
        if self.analog.ndim == 1:
            yield self
            return
        for analog, digital in zip(self.analog, self.digital):
            yield self.model_copy(update={"analog": analog, "digital": digital})


def _mix_crosstalk(powers: np.ndarray, kappa: float) -> np.ndarray:
    """Nearest-neighbour leakage along the last axis with reflecting edges."""
    if kappa == 0.0:
        return powers
    padded = np.pad(powers, [(0, 0)] * (powers.ndim - 1) + [(1, 1)], mode="edge")
    neighbours = padded[..., :-2] + padded[..., 2:]
    return (1.0 - kappa) * powers + 0.5 * kappa * neighbours


def replicate(frames: np.ndarray, cfg: HardwareConfig) -> np.ndarray:
    """
    Fan out encoded frames of shape (..., N) into (..., M, N) copies.

    Args:
        frames: Encoded drive levels
        cfg: Hardware configuration

    Returns:
        Per-copy powers after efficiency scaling and crosstalk mixing
    """
    frames = np.asarray(frames, dtype=float)
    copies = frames[..., np.newaxis, :] * cfg.efficiencies[:, np.newaxis]
    return _mix_crosstalk(copies, cfg.crosstalk)


def fanout_replicate(frame: InputFrame, cfg: HardwareConfig) -> np.ndarray:
    """
    Replicate one frame into M copies through the DOE.

    Args:
        frame: Encoded input frame
        cfg: Hardware configuration

    Returns:
        Array (M, N) of per-copy powers
    """
    if len(frame) != cfg.n_inputs:
        raise DimensionError(f"Frame has {len(frame)} values, config expects {cfg.n_inputs}")
    return replicate(frame.activations, cfg)


def _frame_draws(n_frames: int, n_channels: int, common_mode: bool, seed: SeedLike, frame_offset: int):
    """
    Standard-normal draws of shape (2, F, M) for the two arms, plus (F, M) for shared RIN.

    An integer seed gives every frame its own generator keyed by (seed, frame index), so a
    frame's noise does not depend on the batch it was run in. A Generator is consumed as
    one stream for the whole batch.
    """
    width = 3 if common_mode else 2
    if isinstance(seed, np.random.Generator):
        draws = seed.standard_normal((width, n_frames, n_channels))
    else:
        draws = np.empty((width, n_frames, n_channels))
        for f in range(n_frames):
            draws[:, f, :] = frame_rng(seed, frame_offset + f).standard_normal((width, n_channels))
    return draws[:2], (draws[2] if common_mode else None)


def _arm_noise(signal, reference, cfg: HardwareConfig, noise: NoiseParams, draws, shared):
    """Noise on both arms in normalized power units."""
    scale = cfg.max_power_per_vcsel

    if shared is None:
        std_signal = arm_noise_std(signal * scale, noise)
        std_reference = arm_noise_std(reference * scale, noise)
        return draws[0] * std_signal / scale, draws[1] * std_reference / scale

    # RIN shared by both arms of a copy, the rest independent
    std_signal = arm_noise_std(signal * scale, noise, include_rin=False)
    std_reference = arm_noise_std(reference * scale, noise, include_rin=False)
    relative = shared * np.sqrt(noise.rin * noise.bandwidth)
    return (
        draws[0] * std_signal / scale + signal * relative,
        draws[1] * std_reference / scale + reference * relative,
    )


def optical_mvm_batch(
        frames,
        plane: WeightPlane,
        cfg: HardwareConfig,
        noise: Optional[NoiseParams] = None,
        seed: SeedLike = None,
        frame_offset: int = 0
) -> DetectorReadout:
    """
    Run F encoded frames through the optical core.

    Args:
        frames: Encoded drive levels of shape (F, N) in [0, 1]
        plane: Weight plane of shape (M, N)
        cfg: Hardware configuration
        noise: Noise parameters, None for a noiseless readout
        seed: Base seed (frame f draws from frame_rng(seed, frame_offset + f)), or a
            Generator consumed for the whole batch. None picks a fresh base seed.
        frame_offset: Global index of the first frame, for runs split into chunks

    Returns:
        Batch DetectorReadout with analog/digital of shape (F, M)
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=float))
    if frames.shape[-1] != cfg.n_inputs:
        raise DimensionError(f"Frames have {frames.shape[-1]} inputs, config expects {cfg.n_inputs}")
    if plane.shape != (cfg.n_fanout, cfg.n_inputs):
        raise DimensionError(f"Weight plane {plane.shape} does not match ({cfg.n_fanout}, {cfg.n_inputs})")

    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
    elif isinstance(seed, np.integer):
        seed = int(seed)

    powers = replicate(frames, cfg)  # (F, M, N)
    split = cfg.reference_split
    signal = np.einsum("fmn,mn->fm", powers, plane.transmission)
    reference = split * powers.sum(axis=-1)

    if noise is not None:
        draws, shared = _frame_draws(len(frames), cfg.n_fanout, noise.rin_common_mode, seed, frame_offset)
        signal_noise, reference_noise = _arm_noise(signal, reference, cfg, noise, draws, shared)
        signal = signal + signal_noise
        reference = reference + reference_noise

    analog = 2.0 * (signal - reference) / (2.0 * split)
    digital = adc_quantize(analog, cfg.full_scale, cfg.adc_bits)

    return DetectorReadout(
        analog=analog,
        digital=digital,
        full_scale=cfg.full_scale,
        adc_bits=cfg.adc_bits,
        seed_used=seed if isinstance(seed, int) else None,
    )


def optical_mvm(
        frame: InputFrame,
        plane: WeightPlane,
        cfg: HardwareConfig,
        noise: Optional[NoiseParams] = None,
        seed: SeedLike = None
) -> DetectorReadout:
    """
    Run one frame through the optical core: Y_m = sum_n W_mn X_n plus noise.

    Args:
        frame: Encoded input frame
        plane: Weight plane of shape (M, N)
        cfg: Hardware configuration
        noise: Noise parameters, None for a noiseless readout
        seed: Seed or generator for the noise draws

    Returns:
        DetectorReadout with M analog values and M ADC codes
    """
    if len(frame) != cfg.n_inputs:
        raise DimensionError(f"Frame has {len(frame)} values, config expects {cfg.n_inputs}")
    batch = optical_mvm_batch(frame.activations[np.newaxis, :], plane, cfg, noise, seed)
    return batch.model_copy(update={"analog": batch.analog[0], "digital": batch.digital[0]})


def quantization_bound(cfg: HardwareConfig, lut_step: float = 0.0) -> float:
    """Noiseless worst-case |analog - exact dot product|: N 2^-dac_bits + N lut_step."""
    return cfg.n_inputs * (dac_step(cfg.dac_bits) + lut_step)
