"""
Forward pass of the optical-mapped CNN.

pad 28x28 -> 30x30, 3x3 stride-3 conv (one non-overlapping patch per output pixel),
ReLU, optional Gaussian activation noise, kernel-major flatten, dense, softmax.
"""
import logging
from typing import Any, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.special import softmax

from src.convnet.backends import OpticalSetup, digital_conv
from src.convnet.config import Backend
from src.convnet.model import CnnModel, GRID, KERNEL_SIZE, N_KERNELS
from src.datasets.patches import batch_patches
from src.exceptions import DimensionError, DomainError, InternalError
from src.seeds import frame_rng, substream_seed

# Configure logger
logger = logging.getLogger(__name__)

IMAGE_SHAPE = (28, 28)
PROBABILITY_TOLERANCE = 1e-6


class ForwardResult(BaseModel):
    """Intermediate and final values of a batch forward pass."""

    patches: Any          # (B, 100, 9) patch matrix the conv consumed
    pre_activations: Any  # (B, 100, 9) conv outputs, patch-major
    activations: Any      # (B, 100, 9) after ReLU and activation noise
    features: Any         # (B, 900) kernel-major flatten
    logits: Any           # (B, 10)
    probabilities: Any    # (B, 10)
    labels: Any           # (B,)

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def feature_maps(self) -> np.ndarray:
        """(B, 9, 10, 10) post-activation maps."""
        return self.features.reshape(-1, N_KERNELS, GRID, GRID)

    @property
    def relu_mask(self) -> np.ndarray:
        return self.pre_activations > 0.0


class Prediction(BaseModel):
    """Single-image forward output."""

    feature_maps: Any
    probabilities: Any
    label: int

    model_config = ConfigDict(arbitrary_types_allowed=True)


def _check_images(images: np.ndarray) -> np.ndarray:
    images = np.asarray(images, dtype=float)
    if images.ndim != 3 or images.shape[1:] != IMAGE_SHAPE:
        raise DimensionError(f"Expected images of shape (B, 28, 28), got {images.shape}")
    if images.size and (images.min() < 0.0 or images.max() > 1.0):
        raise DomainError("Images must be normalized to [0, 1]")
    return images


def forward_batch(
        model: CnnModel,
        images,
        backend: Union[Backend, str] = Backend.DIGITAL,
        noise_sigma: float = 0.0,
        seed: Optional[int] = None,
        keys: Optional[Sequence[Sequence[int]]] = None,
        optical: Optional[OpticalSetup] = None
) -> ForwardResult:
    """
    Run a batch of images through the network.

    Args:
        model: Conv kernels and dense weights
        images: Array (B, 28, 28) in [0, 1]
        backend: "digital" or "optical-sim"
        noise_sigma: Std of the Gaussian added to every post-ReLU activation
        seed: Base seed; hardware and activation noise use separate sub-streams
        keys: Per-image generator keys, defaults to (i,) for image i of the batch
        optical: Hardware used by the optical backend, noiseless defaults if None

    Returns:
        ForwardResult
    """
    backend = Backend(backend)
    if noise_sigma < 0.0:
        raise DomainError(f"Activation noise std must be non-negative, got {noise_sigma}")
    images = _check_images(images)
    batch = len(images)
    keys = [(i,) for i in range(batch)] if keys is None else list(keys)
    if len(keys) != batch:
        raise DimensionError(f"{len(keys)} generator keys for {batch} images")

    patches = batch_patches(images, kernel=KERNEL_SIZE, stride=KERNEL_SIZE, pad=1)
    kernels = model.kernel_matrix

    if backend == Backend.OPTICAL:
        optical = optical or OpticalSetup()
        hw_seed = None if seed is None else substream_seed(seed, "hardware-noise")
        pre = optical.conv(patches, kernels, hw_seed, keys)
    else:
        pre = digital_conv(patches, kernels)

    activations = np.maximum(pre, 0.0)
    if noise_sigma > 0.0:
        act_seed = None if seed is None else substream_seed(seed, "activation-noise")
        for b, key in enumerate(keys):
            activations[b] += frame_rng(act_seed, *key).normal(0.0, noise_sigma, activations.shape[1:])

    # (B, P, K) -> (B, K, P): kernel-major, row-major spatial
    features = activations.transpose(0, 2, 1).reshape(batch, -1)
    logits = features @ model.dense_weights
    probabilities = softmax(logits, axis=-1)

    if batch and np.max(np.abs(probabilities.sum(axis=1) - 1.0)) > PROBABILITY_TOLERANCE:
        raise InternalError("Softmax probabilities do not sum to 1")

    return ForwardResult(
        patches=patches,
        pre_activations=pre,
        activations=activations,
        features=features,
        logits=logits,
        probabilities=probabilities,
        labels=np.argmax(probabilities, axis=1),
    )


def forward(
        model: CnnModel,
        image,
        backend: Union[Backend, str] = Backend.DIGITAL,
        noise_sigma: float = 0.0,
        seed: Optional[int] = None,
        optical: Optional[OpticalSetup] = None
) -> Prediction:
    """Classify one 28x28 image."""
    image = np.asarray(image, dtype=float)
    if image.shape != IMAGE_SHAPE:
        raise DimensionError(f"Expected a 28x28 image, got shape {image.shape}")

    result = forward_batch(model, image[np.newaxis], backend, noise_sigma, seed, optical=optical)
    return Prediction(
        feature_maps=result.feature_maps[0],
        probabilities=result.probabilities[0],
        label=int(result.labels[0]),
    )
