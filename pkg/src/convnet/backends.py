"""
Convolution backends: exact digital products, or the optical core simulation with
the kernels programmed onto the SLM (M = 9 copies, N = 9 patch values).
"""
import logging
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.exceptions import DimensionError
from src.hardware.batch import optical_matmul
from src.hardware.config import HardwareConfig
from src.hardware.optics import WeightPlane
from src.noise.params import NoiseParams
from src.noise.snr import noise_for_output_error
from src.seeds import frame_rng

# Configure logger
logger = logging.getLogger(__name__)

# Measured per-output error std of the optical MVM
DEFAULT_OUTPUT_ERROR = 0.0327


def digital_conv(patches: np.ndarray, kernel_matrix: np.ndarray) -> np.ndarray:
    """(B, P, 9) patches against (K, 9) kernels -> (B, P, K) pre-activations."""
    return patches @ kernel_matrix.T


class OpticalSetup(BaseModel):
    """Hardware, noise and (optionally) SLM calibration used by the optical backend."""

    hardware: HardwareConfig = Field(default_factory=HardwareConfig)
    noise: Optional[NoiseParams] = None
    lut: Optional[Any] = None
    device: Optional[Any] = None
    rescale: bool = True

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @classmethod
    def at_output_error(cls, fraction: float = DEFAULT_OUTPUT_ERROR, hardware: Optional[HardwareConfig] = None,
                        **kwargs) -> "OpticalSetup":
        """Setup whose optical MVM error std is `fraction` of the unit output."""
        hardware = hardware or HardwareConfig()
        return cls(hardware=hardware, noise=noise_for_output_error(fraction, hardware), **kwargs)

    def plane(self, kernel_matrix: np.ndarray) -> WeightPlane:
        if self.lut is not None and self.device is not None:
            return WeightPlane.from_lut(kernel_matrix, self.lut, self.device)
        return WeightPlane.ideal(kernel_matrix)

    def conv(
            self,
            patches: np.ndarray,
            kernel_matrix: np.ndarray,
            seed: Optional[int],
            keys: Sequence[Sequence[int]]
    ) -> np.ndarray:
        """
        Optical pre-activations for a batch.

        Args:
            patches: Array (B, P, N)
            kernel_matrix: Array (M, N)
            seed: Base seed of the hardware-noise stream
            keys: Per-image key (e.g. (epoch, index)) deriving that image's generator

        Returns:
            Array (B, P, M)
        """
        if kernel_matrix.shape != (self.hardware.n_fanout, self.hardware.n_inputs):
            raise DimensionError(
                f"Kernels {kernel_matrix.shape} do not fit the optical core "
                f"({self.hardware.n_fanout}, {self.hardware.n_inputs})"
            )

        plane = self.plane(kernel_matrix)
        out = np.empty(patches.shape[:2] + (kernel_matrix.shape[0],))
        for b, key in enumerate(keys):
            rng = frame_rng(seed, *key)
            out[b] = optical_matmul(patches[b], plane, self.hardware, self.noise, rng, self.rescale)
        return out
