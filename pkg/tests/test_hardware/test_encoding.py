"""
Tests for input encoding, converters and the weight-to-phase map.
"""
import numpy as np
import pytest

from src.exceptions import DimensionError, DomainError
from src.hardware.config import HardwareConfig
from src.hardware.encoding import InputFrame, encode_input, encode_inputs, phase_to_weight, weight_to_phase
from src.hardware.quantizers import adc_quantize, dac_quantize, round_half_away


def test_encode_zeros(hardware):
    """All-zero input stays zero"""
    frame = encode_input(np.zeros(9), hardware)
    assert np.array_equal(frame.activations, np.zeros(9))


def test_encode_rounds_half_up():
    """0.5 at 8 bits lands on 128/255"""
    cfg = HardwareConfig(n_inputs=3)
    frame = encode_input([1.0, 0.5, 0.0], cfg)
    assert np.array_equal(frame.activations, [255 / 255, 128 / 255, 0.0])


def test_encode_clips():
    """Out-of-range drive values are clipped"""
    cfg = HardwareConfig(n_inputs=2)
    frame = encode_input([1.7, -0.3], cfg)
    assert np.array_equal(frame.activations, [1.0, 0.0])


def test_encode_length_mismatch(hardware):
    """Wrong vector length is a dimension error"""
    with pytest.raises(DimensionError):
        encode_input(np.zeros(4), hardware)
    with pytest.raises(DimensionError):
        encode_inputs(np.zeros((3, 4)), hardware)


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_encode_rejects_non_finite(hardware, bad):
    """NaN and infinities cannot be clipped into a drive level"""
    with pytest.raises(DomainError):
        encode_input([bad] + [0.5] * 8, hardware)
    with pytest.raises(DomainError):
        encode_inputs(np.full((2, 9), bad), hardware)


def test_input_frame_rejects_nan():
    with pytest.raises(ValueError):
        InputFrame(activations=[np.nan, 0.5])


def test_ideal_dac_passes_values():
    """dac_bits=None only clips"""
    assert np.array_equal(dac_quantize([0.123, 1.5], None), [0.123, 1.0])


def test_round_half_away():
    """Ties go away from zero"""
    assert np.array_equal(round_half_away([0.5, 1.5, 2.5, -0.5, -2.5]), [1, 2, 3, -1, -3])


def test_adc_codes_within_range():
    """ADC codes stay in the two's-complement range"""
    codes = adc_quantize(np.linspace(-20, 20, 101), full_scale=9.0, bits=10)
    assert codes.min() >= -512
    assert codes.max() <= 511
    assert adc_quantize(9.0, 9.0, 10) == 511


@pytest.mark.parametrize("w,phi", [(0.0, np.pi / 2), (1.0, np.pi), (-1.0, 0.0), (0.5, 2 * np.pi / 3)])
def test_weight_to_phase_examples(w, phi):
    """Closed-form phases at quadrature, the endpoints and w = 0.5"""
    assert weight_to_phase(w) == pytest.approx(phi, abs=1e-12)


def test_weight_to_phase_transmission():
    """w = 0.5 gives transmission 0.75"""
    phi = weight_to_phase(0.5)
    assert np.sin(phi / 2) ** 2 == pytest.approx(0.75, abs=1e-12)


def test_weight_phase_round_trip():
    """phase_to_weight inverts weight_to_phase"""
    w = np.linspace(-1, 1, 41)
    assert np.allclose(phase_to_weight(weight_to_phase(w)), w, atol=1e-12)


def test_weight_out_of_domain():
    """|w| > 1 is a domain error"""
    with pytest.raises(DomainError):
        weight_to_phase(1.01)
    with pytest.raises(ValueError):
        weight_to_phase([-2.0, 0.0])
