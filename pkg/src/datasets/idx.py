"""
IDX file format (MNIST / Fashion-MNIST) reader and writer.

    images: >u4 magic 0x00000803, >u4 count, >u4 rows, >u4 cols, count*rows*cols bytes
    labels: >u4 magic 0x00000801, >u4 count, count bytes
Files ending in .gz are (de)compressed transparently.
"""
import gzip
import logging
import struct
from pathlib import Path
from typing import Any, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from config.settings import DATASET_FILES, FASTONN_DATA_DIR, SUPPORTED_DATASETS
from src.exceptions import ConfigError, EmptyDatasetError, FormatError, LengthError, PairingError

# Configure logger
logger = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801

PathLike = Union[str, Path]


class ImageSet(BaseModel):
    """Grayscale images (count x rows x cols bytes) with their class labels."""

    images: Any
    labels: Any

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @field_validator("images")
    def check_images(cls, v):
        v = np.asarray(v)
        if v.ndim != 3:
            raise ValueError("Images must have shape (count, rows, cols)")
        if v.dtype != np.uint8:
            if np.any(v < 0) or np.any(v > 255):
                raise ValueError("Pixel values must lie in [0, 255]")
            v = v.astype(np.uint8)
        return v

    @field_validator("labels")
    def check_labels(cls, v):
        v = np.asarray(v)
        if v.ndim != 1:
            raise ValueError("Labels must be a vector")
        if np.any(v < 0) or np.any(v > 9):
            raise ValueError("Labels must lie in 0..9")
        return v.astype(np.uint8)

    @model_validator(mode="after")
    def check_pairing(self):
        if len(self.images) != len(self.labels):
            raise ValueError(f"{len(self.images)} images but {len(self.labels)} labels")
        return self

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def normalized(self) -> np.ndarray:
        """Pixels scaled to [0, 1]."""
        return self.images.astype(float) / 255.0

    def subset(self, count: int, seed: Union[int, np.random.Generator, None] = None) -> "ImageSet":
        """Deterministic random subset of at most count samples, kept in file order."""
        if count >= len(self):
            return self
        rng = np.random.default_rng(seed)
        index = np.sort(rng.choice(len(self), size=count, replace=False))
        return ImageSet(images=self.images[index], labels=self.labels[index])

    def head(self, count: int) -> "ImageSet":
        return ImageSet(images=self.images[:count], labels=self.labels[:count])


def _read_bytes(path: Path) -> bytes:
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as handle:
            return handle.read()
    return path.read_bytes()


def _write_bytes(path: Path, payload: bytes) -> None:
    if path.suffix == ".gz":
        with gzip.open(path, "wb") as handle:
            handle.write(payload)
    else:
        path.write_bytes(payload)


def _unpack_header(raw: bytes, fmt: str, path: Path) -> Tuple[int, ...]:
    size = struct.calcsize(fmt)
    if len(raw) < size:
        raise LengthError(f"{path}: header needs {size} bytes, file has {len(raw)}")
    return struct.unpack(fmt, raw[:size])


def read_idx_images(path: PathLike) -> np.ndarray:
    path = Path(path)
    raw = _read_bytes(path)
    magic, = _unpack_header(raw, ">I", path)
    if magic != IMAGE_MAGIC:
        raise FormatError(f"{path}: magic 0x{magic:08X} is not an IDX image file (0x{IMAGE_MAGIC:08X})")

    _, count, rows, cols = _unpack_header(raw, ">IIII", path)
    expected = count * rows * cols
    payload = raw[16:]
    if len(payload) < expected:
        raise LengthError(f"{path}: expected {expected} pixel bytes, found {len(payload)}")
    if len(payload) > expected:
        logger.warning(f"{path}: ignoring {len(payload) - expected} trailing bytes")

    return np.frombuffer(payload[:expected], dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path: PathLike) -> np.ndarray:
    path = Path(path)
    raw = _read_bytes(path)
    magic, = _unpack_header(raw, ">I", path)
    if magic != LABEL_MAGIC:
        raise FormatError(f"{path}: magic 0x{magic:08X} is not an IDX label file (0x{LABEL_MAGIC:08X})")

    _, count = _unpack_header(raw, ">II", path)
    payload = raw[8:]
    if len(payload) < count:
        raise LengthError(f"{path}: expected {count} label bytes, found {len(payload)}")

    labels = np.frombuffer(payload[:count], dtype=np.uint8)
    if np.any(labels > 9):
        raise FormatError(f"{path}: labels outside 0..9")
    return labels


def load_idx(images_path: PathLike, labels_path: PathLike) -> ImageSet:
    """
    Load an image/label pair of IDX files.

    Args:
        images_path: IDX3 image file
        labels_path: IDX1 label file

    Returns:
        ImageSet

    Raises:
        FormatError: Wrong magic number
        LengthError: Truncated payload
        PairingError: Image and label counts differ
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if len(images) != len(labels):
        raise PairingError(f"{images_path} has {len(images)} images but {labels_path} has {len(labels)} labels")

    logger.info(f"Loaded {len(images)} images of {images.shape[1]}x{images.shape[2]} from {images_path}")
    return ImageSet(images=images, labels=labels)


def write_idx(images_path: PathLike, labels_path: PathLike, image_set: ImageSet) -> None:
    """Write an ImageSet as an IDX image/label pair."""
    count, rows, cols = image_set.images.shape
    _write_bytes(
        Path(images_path),
        struct.pack(">IIII", IMAGE_MAGIC, count, rows, cols) + image_set.images.tobytes()
    )
    _write_bytes(
        Path(labels_path),
        struct.pack(">II", LABEL_MAGIC, count) + image_set.labels.tobytes()
    )


def _locate(directory: Path, stem: str) -> Optional[Path]:
    for candidate in (directory / stem, directory / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    return None


def find_dataset(name: str, split: str = "train", data_dir: Optional[PathLike] = None) -> Tuple[Path, Path]:
    """
    Locate the IDX files of a named dataset split.

    Args:
        name: 'mnist' or 'fashion-mnist'
        split: 'train' or 'test'
        data_dir: Root directory, defaults to FASTONN_DATA_DIR

    Returns:
        (images_path, labels_path)
    """
    if name not in SUPPORTED_DATASETS:
        raise ConfigError(f"Unknown dataset '{name}', expected one of {SUPPORTED_DATASETS}")
    if split not in ("train", "test"):
        raise ConfigError(f"Unknown split '{split}'")

    root = data_dir or FASTONN_DATA_DIR
    if root is None:
        raise ConfigError("No data directory given and FASTONN_DATA_DIR is not set")

    directory = Path(root) / name
    images = _locate(directory, DATASET_FILES[f"{split}_images"])
    labels = _locate(directory, DATASET_FILES[f"{split}_labels"])
    if images is None or labels is None:
        raise FileNotFoundError(f"IDX files for {name}/{split} not found under {directory}")
    return images, labels


def load_dataset(name: str, split: str = "train", data_dir: Optional[PathLike] = None) -> ImageSet:
    images_path, labels_path = find_dataset(name, split, data_dir)
    image_set = load_idx(images_path, labels_path)
    if len(image_set) == 0:
        raise EmptyDatasetError(f"{images_path} contains no images")
    return image_set
