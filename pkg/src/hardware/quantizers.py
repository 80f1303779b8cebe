"""
Uniform converters shared by the VCSEL drive (DAC) and the detector readout (ADC).
All rounding is half-away-from-zero so bit-exact results do not depend on numpy's banker's rounding.
"""
from typing import Optional

import numpy as np

# Widest converter supported; ideal ADCs still report codes at this width
MAX_BITS = 16


def round_half_away(x):
    """Round to the nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def dac_quantize(x, bits: Optional[int]) -> np.ndarray:
    """
    Clip to [0, 1] and quantize to 2^bits - 1 uniform steps.

    Args:
        x: Raw drive values
        bits: DAC depth, None for an ideal DAC

    Returns:
        Quantized values in [0, 1]
    """
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    if bits is None:
        return x
    levels = 2 ** bits - 1
    return round_half_away(x * levels) / levels


def adc_half_range(bits: Optional[int]) -> int:
    """Largest positive two's-complement code."""
    return 2 ** ((bits or MAX_BITS) - 1) - 1


def adc_quantize(analog, full_scale: float, bits: Optional[int]) -> np.ndarray:
    """
    Convert differential outputs on [-full_scale, +full_scale] to signed codes.

    Args:
        analog: Differential detector outputs
        full_scale: Half range of the converter input
        bits: ADC depth, None for an ideal ADC (coded at MAX_BITS)

    Returns:
        int64 codes in [-2^(b-1), 2^(b-1) - 1]
    """
    half = adc_half_range(bits)
    codes = round_half_away(np.asarray(analog, dtype=float) / full_scale * half)
    return np.clip(codes, -half - 1, half).astype(np.int64)


def adc_dequantize(codes, full_scale: float, bits: Optional[int]) -> np.ndarray:
    """Map codes back onto the analog scale."""
    return np.asarray(codes, dtype=float) * full_scale / adc_half_range(bits)


def dac_step(bits: Optional[int]) -> float:
    """Worst-case per-input encoding error bound 2^-bits (0 for an ideal DAC)."""
    return 0.0 if bits is None else 2.0 ** -bits
