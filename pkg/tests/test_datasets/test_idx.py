"""
Tests for the IDX reader and writer.
"""
import gzip
import struct

import numpy as np
import pytest
from pydantic import ValidationError

from src.datasets.idx import ImageSet, find_dataset, load_dataset, load_idx, read_idx_images, write_idx
from src.exceptions import ConfigError, FormatError, LengthError, PairingError


def _labels_file(path, labels):
    path.write_bytes(struct.pack(">II", 0x00000801, len(labels)) + bytes(labels))
    return path


def test_hand_built_file(tmp_path):
    """Two 28 x 28 images from a byte-level header"""
    header = bytes.fromhex("00000803" "00000002" "0000001C" "0000001C")
    pixels = bytes(range(256)) * 6 + bytes(32)
    (tmp_path / "images").write_bytes(header + pixels)
    image_set = load_idx(tmp_path / "images", _labels_file(tmp_path / "labels", [3, 9]))
    assert image_set.images.shape == (2, 28, 28)
    assert image_set.images[0, 0, 5] == 5
    assert image_set.labels.tolist() == [3, 9]


def test_wrong_magic(tmp_path):
    """0x00000804 is not an image file"""
    (tmp_path / "images").write_bytes(bytes.fromhex("00000804" "00000001" "00000001" "00000001") + b"\x00")
    with pytest.raises(FormatError):
        read_idx_images(tmp_path / "images")


def test_truncated_payload(tmp_path):
    """Missing pixel bytes"""
    (tmp_path / "images").write_bytes(bytes.fromhex("00000803" "00000002" "0000001C" "0000001C") + bytes(100))
    with pytest.raises(LengthError):
        read_idx_images(tmp_path / "images")
    (tmp_path / "stub").write_bytes(b"\x00\x00")
    with pytest.raises(LengthError):
        read_idx_images(tmp_path / "stub")


def test_pairing_error(tmp_path):
    """Two images with three labels"""
    (tmp_path / "images").write_bytes(bytes.fromhex("00000803" "00000002" "0000001C" "0000001C") + bytes(1568))
    with pytest.raises(PairingError):
        load_idx(tmp_path / "images", _labels_file(tmp_path / "labels", [1, 2, 3]))


def test_label_range(tmp_path):
    """Label bytes above 9 are rejected"""
    (tmp_path / "images").write_bytes(bytes.fromhex("00000803" "00000001" "00000001" "00000001") + b"\x07")
    with pytest.raises(FormatError):
        load_idx(tmp_path / "images", _labels_file(tmp_path / "labels", [12]))


def test_write_then_read_gzip(tmp_path, synthetic_images):
    """Compressed files are handled transparently"""
    write_idx(tmp_path / "imgs.gz", tmp_path / "lbls.gz", synthetic_images)
    with gzip.open(tmp_path / "imgs.gz", "rb") as handle:
        assert handle.read(4) == bytes.fromhex("00000803")
    loaded = load_idx(tmp_path / "imgs.gz", tmp_path / "lbls.gz")
    assert np.array_equal(loaded.images, synthetic_images.images)
    assert np.array_equal(loaded.labels, synthetic_images.labels)


def test_image_set_validation():
    """Pairing and value ranges"""
    with pytest.raises(ValidationError):
        ImageSet(images=np.zeros((2, 28, 28)), labels=[1])
    with pytest.raises(ValidationError):
        ImageSet(images=np.zeros((1, 28, 28)), labels=[10])
    with pytest.raises(ValidationError):
        ImageSet(images=np.full((1, 28, 28), 300), labels=[1])


def test_normalized_range(synthetic_images):
    """Pixels scale to [0, 1]"""
    normalized = synthetic_images.normalized
    assert normalized.max() == 1.0
    assert normalized.min() == 0.0


def test_subset_deterministic(synthetic_images):
    """Same seed, same subset, in file order"""
    first = synthetic_images.subset(20, seed=3)
    second = synthetic_images.subset(20, seed=3)
    assert len(first) == 20
    assert np.array_equal(first.images, second.images)
    assert synthetic_images.subset(100, seed=3) is synthetic_images
    assert len(synthetic_images.head(5)) == 5


def test_find_dataset(tmp_path, synthetic_images):
    """Plain or gzipped files under <root>/<name>/"""
    directory = tmp_path / "mnist"
    directory.mkdir()
    write_idx(directory / "t10k-images-idx3-ubyte.gz", directory / "t10k-labels-idx1-ubyte", synthetic_images)

    images, labels = find_dataset("mnist", "test", tmp_path)
    assert images.name == "t10k-images-idx3-ubyte.gz"
    assert labels.name == "t10k-labels-idx1-ubyte"
    assert len(load_dataset("mnist", "test", tmp_path)) == len(synthetic_images)

    with pytest.raises(FileNotFoundError):
        find_dataset("mnist", "train", tmp_path)
    with pytest.raises(ConfigError):
        find_dataset("cifar", "train", tmp_path)
