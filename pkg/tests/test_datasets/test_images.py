"""
Tests for grayscale image files.
"""
import numpy as np
import pytest
from PIL import Image

from src.datasets.images import read_image, write_image
from src.exceptions import FormatError, LengthError


def test_pgm_binary(tmp_path, rng):
    """P5 files keep 8-bit values"""
    pixels = rng.integers(0, 256, (5, 7), dtype=np.uint8)
    path = write_image(tmp_path / "image.pgm", pixels)
    assert path.read_bytes().startswith(b"P5\n7 5\n255\n")
    assert np.array_equal(np.round(read_image(path) * 255).astype(np.uint8), pixels)


def test_float_image_written_rounded(tmp_path):
    path = write_image(tmp_path / "edges.pgm", np.array([[0.0, 0.5, 1.0]]))
    assert np.allclose(read_image(path), [[0.0, 128 / 255, 1.0]])


def test_pgm_ascii_with_comment(tmp_path):
    """P2 files with header comments"""
    (tmp_path / "ascii.pgm").write_bytes(b"P2\n# edge test\n3 2\n4\n0 1 2\n3 4 0\n")
    image = read_image(tmp_path / "ascii.pgm")
    assert image.shape == (2, 3)
    assert image[1, 1] == 1.0
    assert image[0, 0] == 0.0
    assert image[0, 2] == pytest.approx(0.5, abs=1 / 255)


def test_png_input(tmp_path):
    """Non-PGM formats are read too"""
    pixels = np.zeros((6, 6), dtype=np.uint8)
    pixels[2:4, 2:4] = 255
    Image.fromarray(pixels).save(tmp_path / "square.png")
    assert np.array_equal(read_image(tmp_path / "square.png"), pixels / 255.0)


def test_color_input_reduced_to_gray(tmp_path):
    rgb = np.zeros((2, 2, 3), dtype=np.uint8)
    rgb[0, 0] = 255
    Image.fromarray(rgb).save(tmp_path / "color.png")
    image = read_image(tmp_path / "color.png")
    assert image.shape == (2, 2)
    assert image[1, 1] == 0.0
    assert 0.0 < image[0, 0] < 1.0


def test_image_errors(tmp_path):
    """Unknown content and short bodies"""
    (tmp_path / "bad.pgm").write_bytes(b"not an image at all")
    with pytest.raises(FormatError):
        read_image(tmp_path / "bad.pgm")
    (tmp_path / "short.pgm").write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(LengthError):
        read_image(tmp_path / "short.pgm")


def test_write_rejects_non_2d(tmp_path):
    with pytest.raises(FormatError):
        write_image(tmp_path / "cube.pgm", np.zeros((2, 2, 2)))
