"""
Analytic SNR of one detector arm and the stochastic noise draws used by the optical MVM.

Components (RMS, watts) at optical power P over bandwidth B:
    N_det  = NEP * sqrt(B)
    N_shot = sqrt(2 h nu P B / eta)
    N_RIN  = P * sqrt(RIN * B)
combined in quadrature.
"""
import logging
import math
from typing import TYPE_CHECKING, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import optimize

from src.exceptions import DomainError, InfeasibleError
from src.noise.params import NoiseParams

if TYPE_CHECKING:
    from src.hardware.config import HardwareConfig

# Configure logger
logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]


def _check_power(power, strictly_positive: bool = False) -> np.ndarray:
    p = np.asarray(power, dtype=float)
    if strictly_positive and np.any(p <= 0.0):
        raise DomainError("Optical power must be positive")
    if np.any(p < 0.0):
        raise DomainError("Optical power cannot be negative")
    return p


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def noise_rms_components(power, params: NoiseParams) -> Tuple:
    """
    RMS noise of each source at a given arm power.

    Args:
        power: Optical power in watts (scalar or array), >= 0
        params: Noise parameters

    Returns:
        (N_det, N_shot, N_RIN) in watts RMS
    """
    p = _check_power(power)
    bandwidth = params.bandwidth

    n_det = np.full_like(p, params.nep * math.sqrt(bandwidth))
    if params.include_shot_noise:
        n_shot = np.sqrt(2.0 * params.photon_energy * p * bandwidth / params.quantum_efficiency)
    else:
        n_shot = np.zeros_like(p)
    n_rin = p * math.sqrt(params.rin * bandwidth)

    return _scalar(n_det), _scalar(n_shot), _scalar(n_rin)


def arm_noise_std(power, params: NoiseParams, include_rin: bool = True):
    """Quadrature sum of the noise components at the given arm power."""
    n_det, n_shot, n_rin = noise_rms_components(power, params)
    total = np.square(n_det) + np.square(n_shot)
    if include_rin:
        total = total + np.square(n_rin)
    return _scalar(np.sqrt(total))


def snr_total(power, params: NoiseParams) -> Tuple:
    """
    Signal-to-noise ratio and effective bits at an arm power.

    Args:
        power: Optical power in watts, > 0
        params: Noise parameters

    Returns:
        (snr, effective_bits) with effective_bits = log2(snr)
    """
    p = _check_power(power, strictly_positive=True)
    noise = np.asarray(arm_noise_std(p, params))
    with np.errstate(divide="ignore"):
        snr = np.where(noise > 0.0, p / np.where(noise > 0.0, noise, 1.0), np.inf)
    return _scalar(snr), _scalar(np.log2(snr))


def rin_plateau_snr(params: NoiseParams) -> float:
    """High-power SNR limit sqrt(2T/RIN) = 1/sqrt(RIN*B)."""
    if params.rin == 0.0:
        return float("inf")
    return 1.0 / math.sqrt(params.rin * params.bandwidth)


def required_power(target_bits: float, params: NoiseParams, rtol: float = 1e-4) -> float:
    """
    Smallest arm power reaching a target number of effective bits.

    Args:
        target_bits: Required log2(SNR)
        params: Noise parameters
        rtol: Relative tolerance of the bisection

    Returns:
        Power in watts with snr_total(power) >= 2**target_bits

    Raises:
        InfeasibleError: If the target lies at or above the RIN plateau
    """
    plateau_bits = math.log2(rin_plateau_snr(params))
    if target_bits >= plateau_bits:
        raise InfeasibleError(
            f"{target_bits:.3f} bits is unreachable; RIN limits the readout to {plateau_bits:.3f} bits",
            plateau_bits=plateau_bits,
        )

    target_snr = 2.0 ** target_bits

    def gap(p):
        return snr_total(p, params)[0] - target_snr

    low, high = 1e-18, 1e-9
    if gap(low) >= 0.0:
        return low
    while gap(high) < 0.0:
        low, high = high, high * 10.0
        if high > 1e6:
            raise InfeasibleError(f"No power below 1 MW reaches {target_bits:.3f} bits", plateau_bits)

    power = optimize.bisect(gap, low, high, xtol=1e-300, rtol=rtol)
    while gap(power) < 0.0:
        power *= 1.0 + rtol

    logger.debug(f"Required power for {target_bits:.2f} bits: {power:.4e} W")
    return float(power)


def sample_arm_noise(power, params: NoiseParams, seed: SeedLike = None, size=None):
    """
    Zero-mean Gaussian noise draw for one detector arm.

    Args:
        power: Arm power in watts, >= 0
        params: Noise parameters
        seed: Seed or generator; identical seeds give identical draws
        size: Optional number (or shape) of draws

    Returns:
        Signed noise in watts
    """
    std = np.asarray(arm_noise_std(power, params))
    rng = np.random.default_rng(seed)
    shape = size if size is not None else std.shape
    draws = rng.standard_normal(shape) * std
    return _scalar(draws)


def snr_curve(params: NoiseParams, powers: Optional[np.ndarray] = None) -> pd.DataFrame:
    """
    Per-source and total SNR over a power grid.

    Args:
        params: Noise parameters
        powers: Arm powers in watts, defaults to 1 nW .. 1 W log-spaced

    Returns:
        DataFrame with power_w, snr_det, snr_shot, snr_rin, snr_total, bits
    """
    if powers is None:
        powers = np.logspace(-9, 0, 91)
    powers = _check_power(powers, strictly_positive=True)

    n_det, n_shot, n_rin = (np.broadcast_to(n, powers.shape) for n in noise_rms_components(powers, params))
    snr, bits = snr_total(powers, params)

    with np.errstate(divide="ignore"):
        frame = pd.DataFrame({
            "power_w": powers,
            "snr_det": powers / n_det,
            "snr_shot": powers / n_shot,
            "snr_rin": powers / n_rin,
            "snr_total": snr,
            "bits": bits,
        })
    return frame


def noise_for_output_error(
        target_fraction: float,
        cfg: "HardwareConfig",
        base: Optional[NoiseParams] = None,
        full_scale: float = 1.0
) -> NoiseParams:
    """
    Detector-noise parameters giving a chosen per-output error.

    The output is (S - R)/r with independent noise of std s on each arm, so its
    std is sqrt(2) * s / r. Shot and RIN noise are switched off to keep the error
    independent of the signal.

    Args:
        target_fraction: Output error std as a fraction of full_scale
        cfg: Hardware configuration (power scale, split ratio, clock rate)
        base: Parameters to copy wavelength and efficiency from
        full_scale: Output unit the fraction refers to

    Returns:
        NoiseParams tuned to the target error
    """
    if target_fraction < 0.0:
        raise DomainError("Target error fraction cannot be negative")

    base = base or NoiseParams(clock_rate=cfg.clock_rate)
    arm_std = target_fraction * full_scale * cfg.reference_split / math.sqrt(2.0)
    bandwidth = cfg.clock_rate / 2.0
    nep = arm_std * cfg.max_power_per_vcsel / math.sqrt(bandwidth)

    return base.model_copy(update={
        "nep": nep,
        "rin": 0.0,
        "include_shot_noise": False,
        "clock_rate": cfg.clock_rate,
    })
