"""
Pytest configuration file for the simulator tests.
This file is automatically detected by pytest and contains global fixtures.
"""
import os

import numpy as np
import pytest

from src.datasets.idx import ImageSet, find_dataset
from src.hardware.config import HardwareConfig
from src.noise.params import REFERENCE_NOISE


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance tests on real datasets")


@pytest.fixture(scope="session", autouse=True)
def set_test_environment():
    """
    Set the TESTING environment variable to true for all tests.
    This fixture runs automatically before any tests.
    """
    os.environ["TESTING"] = "true"
    yield
    # Clean up after all tests
    os.environ.pop("TESTING", None)


@pytest.fixture
def hardware():
    """Default 9 x 9 hardware configuration"""
    return HardwareConfig()


@pytest.fixture
def ideal_hardware():
    """Hardware with ideal converters, no crosstalk"""
    return HardwareConfig(dac_bits=None, adc_bits=None)


@pytest.fixture
def reference_noise():
    """Reference detector and laser noise constants"""
    return REFERENCE_NOISE


@pytest.fixture
def rng():
    """Seeded generator"""
    return np.random.default_rng(1234)


@pytest.fixture
def synthetic_images():
    """
    Small labelled image set: class k is a bright horizontal bar at row 2 + 2k,
    with a little seeded speckle.
    """
    generator = np.random.default_rng(7)
    count = 60
    labels = np.arange(count) % 10
    images = (generator.random((count, 28, 28)) < 0.03).astype(np.uint8) * 60
    for i, label in enumerate(labels):
        row = 2 + 2 * label
        images[i, row:row + 3, 4:24] = 255
    return ImageSet(images=images, labels=labels)


def _dataset_or_skip(name: str, split: str) -> tuple:
    try:
        return find_dataset(name, split)
    except Exception:
        pytest.skip(f"{name}/{split} IDX files not available (set FASTONN_DATA_DIR)")


@pytest.fixture
def mnist_paths():
    """(train_images, train_labels, test_images, test_labels) paths, skipping when absent"""
    return (*_dataset_or_skip("mnist", "train"), *_dataset_or_skip("mnist", "test"))


@pytest.fixture
def fashion_paths():
    """Same as mnist_paths for Fashion-MNIST"""
    return (*_dataset_or_skip("fashion-mnist", "train"), *_dataset_or_skip("fashion-mnist", "test"))
