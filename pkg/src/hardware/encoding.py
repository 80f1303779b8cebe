"""
Input encoding onto the VCSEL array and the weight-to-phase map of the polarization-gated SLM.
"""
import logging
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.exceptions import DimensionError, DomainError
from src.hardware.config import HardwareConfig
from src.hardware.quantizers import dac_quantize

# Configure logger
logger = logging.getLogger(__name__)


class InputFrame(BaseModel):
    """Normalized optical power per VCSEL for one clock cycle."""

    activations: Any

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("activations")
    def check_activations(cls, v):
        v = np.asarray(v, dtype=float)
        if v.ndim != 1:
            raise ValueError("Activations must be a 1-D vector")
        if not np.all(np.isfinite(v)):
            raise ValueError("Activations must be finite")
        if np.any(v < 0.0) or np.any(v > 1.0):
            raise ValueError("Activations must lie in [0, 1]")
        return v

    def __len__(self) -> int:
        return len(self.activations)


def encode_inputs(x, cfg: HardwareConfig) -> np.ndarray:
    """
    Encode a batch of raw input vectors onto the VCSEL array.

    Args:
        x: Array of shape (..., N) with any real values
        cfg: Hardware configuration

    Returns:
        Clipped and DAC-quantized drive levels with the same shape

    Raises:
        DomainError: NaN or infinite drive values
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != cfg.n_inputs:
        raise DimensionError(f"Expected {cfg.n_inputs} inputs, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("Drive values must be finite")

    clipped = np.count_nonzero((x < 0.0) | (x > 1.0))
    if clipped:
        logger.debug(f"Clipped {clipped} drive values into [0, 1]")

    return dac_quantize(x, cfg.dac_bits)


def encode_input(x, cfg: HardwareConfig) -> InputFrame:
    """
    Encode one raw input vector as an InputFrame.

    Args:
        x: N raw values
        cfg: Hardware configuration

    Returns:
        InputFrame with values clipped to [0, 1] and quantized to dac_bits
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionError(f"Expected a vector of {cfg.n_inputs} inputs, got shape {x.shape}")
    return InputFrame(activations=encode_inputs(x, cfg))


def weight_to_phase(w):
    """
    Ideal drive phase for a signed weight.

    The reflected arm sees sin^2(phi/2); against a 50/50 reference the differential
    weight is 2 sin^2(phi/2) - 1 = -cos(phi), so phi = arccos(-w).

    Args:
        w: Weight or array of weights in [-1, 1]

    Returns:
        Phase(s) in [0, pi]
    """
    w_arr = np.asarray(w, dtype=float)
    if np.any(np.abs(w_arr) > 1.0) or np.any(~np.isfinite(w_arr)):
        raise DomainError(f"Weights must lie in [-1, 1], got max |w| = {np.max(np.abs(w_arr))}")
    phase = np.arccos(-w_arr)
    return float(phase) if phase.ndim == 0 else phase


def phase_to_weight(phi):
    """Differential weight realised by a phase: 2 sin^2(phi/2) - 1."""
    weight = 2.0 * np.sin(np.asarray(phi, dtype=float) / 2.0) ** 2 - 1.0
    return float(weight) if weight.ndim == 0 else weight
