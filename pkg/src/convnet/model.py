"""
The optical-mapped classifier: nine bias-free 3x3 kernels (stride 3) feeding a
bias-free 900 x 10 dense layer, plus its binary checkpoint format.

Checkpoint layout: b"FONN", u32 version (little-endian), then little-endian float64
conv kernels (kernel-major, row-major) followed by the dense matrix (row-major).
"""
import logging
import struct
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from src.exceptions import FormatError, LengthError

# Configure logger
logger = logging.getLogger(__name__)

N_KERNELS = 9
KERNEL_SIZE = 3
GRID = 10  # 30x30 padded input, stride 3
N_FEATURES = N_KERNELS * GRID * GRID
N_CLASSES = 10

CHECKPOINT_MAGIC = b"FONN"
CHECKPOINT_VERSION = 1


class CnnModel(BaseModel):
    """Conv kernels (9 x 3 x 3, box-constrained to [-1, 1]) and dense weights (900 x 10)."""

    conv_kernels: Any
    dense_weights: Any

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("conv_kernels")
    def check_kernels(cls, v):
        v = np.array(v, dtype=float)
        if v.shape != (N_KERNELS, KERNEL_SIZE, KERNEL_SIZE):
            raise ValueError(f"Conv kernels must have shape {(N_KERNELS, KERNEL_SIZE, KERNEL_SIZE)}, got {v.shape}")
        if np.any(np.abs(v) > 1.0):
            raise ValueError("Conv weights must lie in [-1, 1]")
        return v

    @field_validator("dense_weights")
    def check_dense(cls, v):
        v = np.array(v, dtype=float)
        if v.shape != (N_FEATURES, N_CLASSES):
            raise ValueError(f"Dense weights must have shape {(N_FEATURES, N_CLASSES)}, got {v.shape}")
        return v

    @classmethod
    def initialize(cls, seed: Union[int, np.random.Generator, None] = None) -> "CnnModel":
        """Glorot-uniform initialization, conv weights clipped into the box."""
        rng = np.random.default_rng(seed)
        conv_limit = np.sqrt(6.0 / (2 * KERNEL_SIZE * KERNEL_SIZE))
        dense_limit = np.sqrt(6.0 / (N_FEATURES + N_CLASSES))
        conv = rng.uniform(-conv_limit, conv_limit, (N_KERNELS, KERNEL_SIZE, KERNEL_SIZE))
        dense = rng.uniform(-dense_limit, dense_limit, (N_FEATURES, N_CLASSES))
        return cls(conv_kernels=np.clip(conv, -1.0, 1.0), dense_weights=dense)

    @property
    def kernel_matrix(self) -> np.ndarray:
        """Kernels as a 9 x 9 matrix, one flattened kernel per row (the SLM weight plane)."""
        return self.conv_kernels.reshape(N_KERNELS, KERNEL_SIZE * KERNEL_SIZE)

    def clone(self) -> "CnnModel":
        return CnnModel(conv_kernels=self.conv_kernels.copy(), dense_weights=self.dense_weights.copy())

    def clip_conv(self) -> None:
        """Enforce the [-1, 1] box constraint in place."""
        np.clip(self.conv_kernels, -1.0, 1.0, out=self.conv_kernels)


def save_checkpoint(path: Union[str, Path], model: CnnModel) -> Path:
    """Write a model in the FONN binary format."""
    path = Path(path)
    payload = (
        CHECKPOINT_MAGIC
        + struct.pack("<I", CHECKPOINT_VERSION)
        + model.conv_kernels.astype("<f8").tobytes()
        + model.dense_weights.astype("<f8").tobytes()
    )
    path.write_bytes(payload)
    logger.info(f"Saved checkpoint to {path}")
    return path


def load_checkpoint(path: Union[str, Path]) -> CnnModel:
    """
    Read a model from the FONN binary format.

    Raises:
        FormatError: Wrong magic or unsupported version
        LengthError: Truncated weights
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: not a FONN checkpoint")
    if len(raw) < 8:
        raise LengthError(f"{path}: truncated header")

    version, = struct.unpack("<I", raw[4:8])
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")

    n_conv = N_KERNELS * KERNEL_SIZE * KERNEL_SIZE
    n_values = n_conv + N_FEATURES * N_CLASSES
    if len(raw) - 8 != 8 * n_values:
        raise LengthError(f"{path}: expected {8 * n_values} weight bytes, found {len(raw) - 8}")
    values = np.frombuffer(raw[8:], dtype="<f8")

    return CnnModel(
        conv_kernels=values[:n_conv].reshape(N_KERNELS, KERNEL_SIZE, KERNEL_SIZE),
        dense_weights=values[n_conv:].reshape(N_FEATURES, N_CLASSES),
    )
