"""
Photodetection noise model: analytic SNR and per-arm noise draws.
"""

from src.noise.params import NoiseParams, REFERENCE_NOISE, rin_dbc_to_linear, rin_linear_to_dbc
from src.noise.snr import (
    noise_rms_components,
    arm_noise_std,
    snr_total,
    rin_plateau_snr,
    required_power,
    sample_arm_noise,
    snr_curve,
    noise_for_output_error
)

__all__ = [
    'NoiseParams',
    'REFERENCE_NOISE',
    'rin_dbc_to_linear',
    'rin_linear_to_dbc',
    'noise_rms_components',
    'arm_noise_std',
    'snr_total',
    'rin_plateau_snr',
    'required_power',
    'sample_arm_noise',
    'snr_curve',
    'noise_for_output_error'
]
