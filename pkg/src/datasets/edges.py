"""
Edge detection with a Laplacian kernel on the SLM, checked against a digital convolution.
"""
import logging
from typing import Any, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.datasets.patches import batch_patches
from src.exceptions import ConfigError, DimensionError
from src.hardware.batch import optical_matmul
from src.hardware.config import HardwareConfig
from src.hardware.optics import WeightPlane
from src.noise.params import NoiseParams

# Configure logger
logger = logging.getLogger(__name__)

# -1 ring, +8 centre, scaled by 1/8 so every weight is in [-1, 1]
LAPLACIAN_KERNEL = np.array([
    [-1.0, -1.0, -1.0],
    [-1.0, 8.0, -1.0],
    [-1.0, -1.0, -1.0],
]) / 8.0

# Binarization threshold as a fraction of the output full scale
EDGE_THRESHOLD = 0.2

BACKENDS = ("digital", "optical")


class EdgeResult(BaseModel):
    """Edge map, its digital oracle and the binarized agreement between them."""

    edge_map: Any
    oracle_map: Any
    agreement: float

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def kernel_full_scale(kernel: np.ndarray) -> float:
    """Largest |output| for inputs in [0, 1]."""
    return float(max(kernel[kernel > 0].sum(), -kernel[kernel < 0].sum()))


def binarize(edge_map, kernel: np.ndarray = LAPLACIAN_KERNEL, threshold: float = EDGE_THRESHOLD) -> np.ndarray:
    return np.abs(edge_map) > threshold * kernel_full_scale(kernel)


def edge_hardware_config(cfg: Optional[HardwareConfig] = None) -> HardwareConfig:
    """Single-copy, 9-input geometry for one 3x3 kernel."""
    cfg = cfg or HardwareConfig()
    return cfg.model_copy(update={"n_inputs": 9, "n_fanout": 1, "fanout_efficiencies": [1.0]})


def edge_detect(
        image,
        backend: str = "digital",
        noise: Optional[NoiseParams] = None,
        cfg: Optional[HardwareConfig] = None,
        seed: Union[int, np.random.Generator, None] = None,
        kernel: np.ndarray = LAPLACIAN_KERNEL
) -> EdgeResult:
    """
    Convolve an image with the edge kernel (stride 1, zero pad 1).

    Args:
        image: Grayscale array (H, W) in [0, 1]
        backend: 'digital' or 'optical'
        noise: Optical noise parameters (optical backend only)
        cfg: Hardware configuration; its geometry is replaced by a single 3x3 copy
        seed: Seed or generator for the optical noise
        kernel: 3x3 kernel with weights in [-1, 1]

    Returns:
        EdgeResult with the backend's map, the digital oracle and their binarized agreement
    """
    if backend not in BACKENDS:
        raise ConfigError(f"Unknown backend '{backend}', expected one of {BACKENDS}")

    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise DimensionError(f"Expected an (H, W) image, got shape {image.shape}")

    patches = batch_patches(image[np.newaxis], kernel=3, stride=1, pad=1)[0]
    weights = np.asarray(kernel, dtype=float).reshape(1, 9)
    oracle = (patches @ weights[0]).reshape(image.shape)

    if backend == "digital":
        edge_map = oracle
    else:
        hardware = edge_hardware_config(cfg)
        values = optical_matmul(patches, WeightPlane.ideal(weights), hardware, noise, seed)
        edge_map = values[:, 0].reshape(image.shape)

    agreement = float(np.mean(binarize(edge_map, kernel) == binarize(oracle, kernel)))
    logger.debug(f"Edge detection ({backend}) agreement {agreement:.4f}")
    return EdgeResult(edge_map=edge_map, oracle_map=oracle, agreement=agreement)


def edge_image(edge_map, kernel: np.ndarray = LAPLACIAN_KERNEL) -> np.ndarray:
    """Edge magnitude scaled to [0, 1] for display or PGM export."""
    return np.clip(np.abs(edge_map) / kernel_full_scale(kernel), 0.0, 1.0)
