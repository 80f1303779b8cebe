"""
Tests for the CNN forward pass, gradients and checkpoints.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from src.convnet.backends import OpticalSetup
from src.convnet.config import Backend, TrainConfig
from src.convnet.layers import forward, forward_batch
from src.convnet.model import CnnModel, load_checkpoint, save_checkpoint
from src.convnet.training import loss_and_grads
from src.exceptions import DimensionError, DomainError, FormatError, LabelError, LengthError
from src.hardware.config import HardwareConfig
from src.hardware.optics import quantization_bound


@pytest.fixture
def model():
    """Seeded Glorot-initialized model"""
    return CnnModel.initialize(seed=11)


def _nested_loop_features(model, image):
    padded = np.pad(image, 1)
    maps = np.zeros((9, 10, 10))
    for k in range(9):
        for r in range(10):
            for c in range(10):
                window = padded[3 * r:3 * r + 3, 3 * c:3 * c + 3]
                maps[k, r, c] = max(0.0, float(np.sum(window * model.conv_kernels[k])))
    return maps


def test_zero_image_gives_uniform_probabilities(model):
    """Zero logits under a bias-free network"""
    prediction = forward(model, np.zeros((28, 28)))
    assert np.all(prediction.feature_maps == 0.0)
    assert np.allclose(prediction.probabilities, 0.1, atol=1e-15)
    assert prediction.feature_maps.shape == (9, 10, 10)


def test_identity_kernel_constant_image():
    """A centre-one kernel passes a constant image straight through"""
    kernels = np.zeros((9, 3, 3))
    kernels[0, 1, 1] = 1.0
    model = CnnModel(conv_kernels=kernels, dense_weights=np.zeros((900, 10)))
    prediction = forward(model, np.full((28, 28), 0.6))
    assert np.allclose(prediction.feature_maps[0], 0.6, rtol=0, atol=1e-15)
    assert np.all(prediction.feature_maps[1:] == 0.0)


def test_forward_matches_nested_loops(model, rng):
    """Vectorized conv equals a direct loop over windows"""
    image = rng.random((28, 28))
    prediction = forward(model, image)
    assert np.allclose(prediction.feature_maps, _nested_loop_features(model, image), rtol=0, atol=1e-12)

    logits = _nested_loop_features(model, image).reshape(-1) @ model.dense_weights
    expected = np.exp(logits - logits.max())
    expected /= expected.sum()
    assert np.allclose(prediction.probabilities, expected, rtol=0, atol=1e-12)
    assert prediction.label == int(np.argmax(expected))


def test_forward_rejects_bad_input(model):
    """Shape and range checks"""
    with pytest.raises(DimensionError):
        forward(model, np.zeros((27, 28)))
    with pytest.raises(DomainError):
        forward(model, np.full((28, 28), 1.5))
    with pytest.raises(DomainError):
        forward_batch(model, np.zeros((1, 28, 28)), noise_sigma=-0.1)


def test_activation_noise_seeded(model, rng):
    """Noisy forwards repeat under a fixed seed"""
    images = rng.random((3, 28, 28))
    first = forward_batch(model, images, noise_sigma=0.1, seed=5)
    second = forward_batch(model, images, noise_sigma=0.1, seed=5)
    clean = forward_batch(model, images)
    assert np.array_equal(first.features, second.features)
    assert not np.array_equal(first.features, clean.features)
    assert np.array_equal(first.relu_mask, clean.relu_mask)


def test_optical_backend_ideal_converters(model, rng, ideal_hardware):
    """Noiseless optical conv with ideal converters reproduces the digital conv"""
    images = rng.random((2, 28, 28))
    digital = forward_batch(model, images, Backend.DIGITAL)
    optical = forward_batch(model, images, Backend.OPTICAL, optical=OpticalSetup(hardware=ideal_hardware))
    assert np.allclose(optical.pre_activations, digital.pre_activations, rtol=0, atol=1e-9)


def test_optical_backend_within_quantization(model, rng, hardware):
    """Default converters stay within the DAC plus ADC error bound"""
    images = rng.random((2, 28, 28))
    digital = forward_batch(model, images, Backend.DIGITAL)
    optical = forward_batch(model, images, "optical-sim", optical=OpticalSetup(hardware=hardware))
    bound = quantization_bound(hardware) + hardware.full_scale / 2 ** (hardware.adc_bits - 1)
    assert np.max(np.abs(optical.pre_activations - digital.pre_activations)) <= bound


def test_optical_backend_needs_nine_by_nine(model, rng):
    """Kernels must fit the optical core"""
    setup = OpticalSetup(hardware=HardwareConfig(n_inputs=9, n_fanout=4))
    with pytest.raises(DimensionError):
        forward_batch(model, rng.random((1, 28, 28)), Backend.OPTICAL, optical=setup)


def test_gradients_match_finite_differences(rng):
    """Central differences with h = 1e-4 on a two-image batch"""
    # Five always-on and four always-off kernels keep every pre-activation far from the ReLU kink
    magnitudes = rng.uniform(0.2, 1.0, (9, 3, 3))
    signs = np.where(np.arange(9) < 5, 1.0, -1.0)[:, np.newaxis, np.newaxis]
    model = CnnModel(conv_kernels=signs * magnitudes, dense_weights=rng.normal(0.0, 0.05, (900, 10)))
    images = rng.uniform(0.2, 1.0, (2, 28, 28))
    labels = np.array([3, 7])
    _, grads = loss_and_grads(model, images, labels)
    h = 1e-4

    def loss_at(candidate):
        return loss_and_grads(candidate, images, labels)[0]

    for index in np.ndindex(model.conv_kernels.shape):
        plus, minus = model.clone(), model.clone()
        plus.conv_kernels[index] += h
        minus.conv_kernels[index] -= h
        numeric = (loss_at(plus) - loss_at(minus)) / (2 * h)
        assert grads.conv[index] == pytest.approx(numeric, rel=1e-4, abs=1e-8)

    for row, col in zip(rng.integers(0, 900, 60), rng.integers(0, 10, 60)):
        plus, minus = model.clone(), model.clone()
        plus.dense_weights[row, col] += h
        minus.dense_weights[row, col] -= h
        numeric = (loss_at(plus) - loss_at(minus)) / (2 * h)
        assert grads.dense[row, col] == pytest.approx(numeric, rel=1e-4, abs=1e-8)


def test_uniform_probabilities_pull_true_class_up(rng):
    """Cross-entropy gradient on the true column is non-positive"""
    model = CnnModel.initialize(seed=2)
    model.dense_weights[:] = 0.0
    images = rng.random((4, 28, 28))
    labels = np.full(4, 5)
    loss, grads = loss_and_grads(model, images, labels)
    assert loss == pytest.approx(np.log(10))
    assert np.all(grads.dense[:, 5] <= 0.0)
    assert grads.dense[:, 5].sum() < 0.0
    others = np.delete(grads.dense, 5, axis=1)
    assert np.all(others >= 0.0)
    # each row of the dense gradient sums to zero across classes
    assert np.allclose(grads.dense.sum(axis=1), 0.0, atol=1e-12)


def test_zero_images_give_zero_conv_grads(model):
    """No signal reaches the kernels through all-zero patches"""
    _, grads = loss_and_grads(model, np.zeros((3, 28, 28)), [1, 2, 3])
    assert np.all(grads.conv == 0.0)
    assert grads.dense.shape == (900, 10)


@pytest.mark.parametrize("labels", [[0, 10], [-1, 2], [0.5, 1.0]])
def test_bad_labels(model, labels):
    """Labels must be integer classes 0..9"""
    with pytest.raises(LabelError):
        loss_and_grads(model, np.zeros((2, 28, 28)), np.array(labels))


def test_optical_training_forward(model, rng, ideal_hardware):
    """Gradients through the optical forward equal the digital ones for an ideal core"""
    images = rng.random((2, 28, 28))
    labels = np.array([1, 4])
    _, digital = loss_and_grads(model, images, labels)
    config = TrainConfig(backend=Backend.OPTICAL)
    _, optical = loss_and_grads(model, images, labels, config, OpticalSetup(hardware=ideal_hardware))
    assert np.allclose(optical.conv, digital.conv, rtol=1e-6, atol=1e-9)
    assert np.allclose(optical.dense, digital.dense, rtol=1e-6, atol=1e-9)


def test_model_box_constraint():
    """Conv weights outside [-1, 1] are rejected"""
    kernels = np.zeros((9, 3, 3))
    kernels[4, 0, 0] = 1.2
    with pytest.raises(ValidationError):
        CnnModel(conv_kernels=kernels, dense_weights=np.zeros((900, 10)))
    with pytest.raises(ValidationError):
        CnnModel(conv_kernels=np.zeros((9, 3, 3)), dense_weights=np.zeros((900, 9)))


def test_checkpoint_round_trip(tmp_path, model):
    """Weights survive save/load bit for bit"""
    path = save_checkpoint(tmp_path / "model.fonn", model)
    assert path.read_bytes()[:4] == b"FONN"
    loaded = load_checkpoint(path)
    assert np.array_equal(loaded.conv_kernels, model.conv_kernels)
    assert np.array_equal(loaded.dense_weights, model.dense_weights)


def test_checkpoint_errors(tmp_path, model):
    """Bad magic, bad version and truncation"""
    path = save_checkpoint(tmp_path / "model.fonn", model)
    raw = path.read_bytes()

    (tmp_path / "magic.fonn").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(FormatError):
        load_checkpoint(tmp_path / "magic.fonn")

    (tmp_path / "version.fonn").write_bytes(raw[:4] + (2).to_bytes(4, "little") + raw[8:])
    with pytest.raises(FormatError):
        load_checkpoint(tmp_path / "version.fonn")

    (tmp_path / "short.fonn").write_bytes(raw[:-8])
    with pytest.raises(LengthError):
        load_checkpoint(tmp_path / "short.fonn")
