"""
Grayscale image reading and writing for the edge-detection path.
"""
import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.exceptions import FormatError, LengthError

# Configure logger
logger = logging.getLogger(__name__)

# Pillow modes that carry more than 8 bits per gray pixel
_WIDE_MODES = ("I", "I;16", "I;16B", "I;16L")


def write_image(path: Union[str, Path], image) -> Path:
    """
    Write an 8-bit grayscale image; the format follows the suffix (.pgm gives binary P5).

    Args:
        path: Output file
        image: Array (H, W), floats in [0, 1] or uint8

    Returns:
        The written path
    """
    path = Path(path)
    image = np.asarray(image)
    if image.ndim != 2:
        raise FormatError(f"{path}: expected a 2-D image, got shape {image.shape}")
    if image.dtype != np.uint8:
        image = np.floor(np.clip(image, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    Image.fromarray(image).save(path)
    logger.debug(f"Wrote {image.shape[1]}x{image.shape[0]} image to {path}")
    return path


def read_image(path: Union[str, Path]) -> np.ndarray:
    """
    Read any image Pillow understands (PGM P2/P5, PNG, JPEG, ...) as grayscale.

    Color images are reduced with Pillow's luma conversion. 16-bit grayscale keeps its depth.

    Returns:
        Array (H, W) of floats in [0, 1]

    Raises:
        FormatError: Not a recognized image
        LengthError: Truncated pixel data
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in _WIDE_MODES:
                pixels = np.asarray(img, dtype=float) / 65535.0
            else:
                pixels = np.asarray(img.convert("L"), dtype=float) / 255.0
    except UnidentifiedImageError:
        raise FormatError(f"{path}: not a recognized image file")
    except OSError as e:
        raise LengthError(f"{path}: unreadable pixel data ({e})")

    logger.debug(f"Read {pixels.shape[1]}x{pixels.shape[0]} image from {path}")
    return np.clip(pixels, 0.0, 1.0)
