"""
Batch driver: many patch vectors against one set of kernels through the optical core.
"""
import logging
from typing import Optional, Union

import numpy as np

from src.exceptions import DimensionError, DomainError
from src.hardware.config import HardwareConfig
from src.hardware.encoding import encode_inputs
from src.hardware.optics import WeightPlane, optical_mvm_batch
from src.noise.params import NoiseParams

# Configure logger
logger = logging.getLogger(__name__)


def optical_matmul(
        patches,
        plane: WeightPlane,
        cfg: HardwareConfig,
        noise: Optional[NoiseParams] = None,
        seed: Union[int, np.random.Generator, None] = None,
        rescale: bool = True
) -> np.ndarray:
    """
    Compute patches @ weights.T optically, one clock cycle per patch.

    Non-negative patches are rescaled to a peak of 1 before encoding and the scale is
    re-applied to the ADC output.

    Args:
        patches: Array (P, N) of non-negative values
        plane: Kernels as a weight plane of shape (M, N)
        cfg: Hardware configuration
        noise: Noise parameters, None for noiseless
        seed: Seed or generator for the noise draws
        rescale: Normalize each patch to its own peak

    Returns:
        Array (P, M) on the digital dot-product scale
    """
    patches = np.asarray(patches, dtype=float)
    if patches.ndim != 2:
        raise DimensionError(f"Expected a (P, N) patch matrix, got shape {patches.shape}")
    if np.any(patches < 0.0):
        raise DomainError("Optical inputs must be non-negative intensities")

    if rescale:
        scale = patches.max(axis=1)
        scale = np.where(scale > 0.0, scale, 1.0)
    else:
        scale = np.ones(len(patches))

    frames = encode_inputs(patches / scale[:, np.newaxis], cfg)
    readout = optical_mvm_batch(frames, plane, cfg, noise, seed)
    return readout.dequantized() * scale[:, np.newaxis]
