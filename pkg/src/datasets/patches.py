"""
Patch extraction matching the optical geometry: each patch is one VCSEL frame.
"""
from typing import Any, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from pydantic import BaseModel, ConfigDict

from src.exceptions import DimensionError, GeometryError


class PatchMatrix(BaseModel):
    """P x k^2 row-major patches and the (row, col) origin of each in the padded image."""

    patches: Any
    origins: Any
    padded_shape: Tuple[int, int]
    kernel: int
    stride: int

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def grid(self) -> Tuple[int, int]:
        rows = (self.padded_shape[0] - self.kernel) // self.stride + 1
        cols = (self.padded_shape[1] - self.kernel) // self.stride + 1
        return rows, cols

    def __len__(self) -> int:
        return len(self.patches)


def _check_geometry(height: int, width: int, kernel: int, stride: int, pad: int) -> Tuple[int, int]:
    padded = (height + 2 * pad, width + 2 * pad)
    if kernel < 1 or stride < 1 or min(padded) < kernel:
        raise GeometryError(f"Kernel {kernel} with stride {stride} does not fit a {padded} input")
    if (padded[0] - kernel) % stride or (padded[1] - kernel) % stride:
        raise GeometryError(f"Kernel {kernel} with stride {stride} does not tile a {padded[0]}x{padded[1]} input")
    return padded


def batch_patches(images, kernel: int = 3, stride: int = 3, pad: int = 1) -> np.ndarray:
    """
    im2col over a batch.

    Args:
        images: Array (B, H, W)
        kernel: Square kernel size
        stride: Stride in both directions
        pad: Zero padding on every side

    Returns:
        Array (B, P, kernel*kernel), patches in row-major grid order
    """
    images = np.asarray(images, dtype=float)
    if images.ndim != 3:
        raise DimensionError(f"Expected a (B, H, W) batch, got shape {images.shape}")
    _check_geometry(images.shape[1], images.shape[2], kernel, stride, pad)

    padded = np.pad(images, [(0, 0), (pad, pad), (pad, pad)])
    windows = sliding_window_view(padded, (kernel, kernel), axis=(1, 2))[:, ::stride, ::stride]
    batch, rows, cols = windows.shape[:3]
    return windows.reshape(batch, rows * cols, kernel * kernel)


def extract_patches(image, kernel: int = 3, stride: int = 3, pad: int = 1) -> PatchMatrix:
    """
    Zero-pad one image and cut it into flattened kernel x kernel patches.

    Args:
        image: Array (H, W)
        kernel: Square kernel size
        stride: Stride in both directions
        pad: Zero padding on every side

    Returns:
        PatchMatrix

    Raises:
        GeometryError: If kernel and stride do not tile the padded size
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise DimensionError(f"Expected an (H, W) image, got shape {image.shape}")
    padded_shape = _check_geometry(image.shape[0], image.shape[1], kernel, stride, pad)

    patches = batch_patches(image[np.newaxis], kernel, stride, pad)[0]
    rows = (padded_shape[0] - kernel) // stride + 1
    cols = (padded_shape[1] - kernel) // stride + 1
    grid_r, grid_c = np.meshgrid(np.arange(rows) * stride, np.arange(cols) * stride, indexing="ij")

    return PatchMatrix(
        patches=np.ascontiguousarray(patches),
        origins=np.stack([grid_r.ravel(), grid_c.ravel()], axis=1),
        padded_shape=padded_shape,
        kernel=kernel,
        stride=stride,
    )


def assemble_patches(patch_matrix: PatchMatrix) -> np.ndarray:
    """Place non-overlapping patches back into the padded image."""
    if patch_matrix.stride != patch_matrix.kernel:
        raise GeometryError("Only non-overlapping patches (stride == kernel) can be reassembled")

    k = patch_matrix.kernel
    image = np.zeros(patch_matrix.padded_shape)
    for patch, (row, col) in zip(patch_matrix.patches, patch_matrix.origins):
        image[row:row + k, col:col + k] = patch.reshape(k, k)
    return image
