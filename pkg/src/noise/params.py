"""
Photodetection noise parameters: detector NEP, shot noise and laser RIN.
"""
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import constants


def rin_dbc_to_linear(rin_dbc_per_hz: float) -> float:
    """Convert RIN in dBc/Hz to a linear per-Hz value."""
    return 10.0 ** (rin_dbc_per_hz / 10.0)


def rin_linear_to_dbc(rin: float) -> float:
    """Convert a linear per-Hz RIN to dBc/Hz."""
    return 10.0 * math.log10(rin)


class NoiseParams(BaseModel):
    """
    Noise sources of one balanced-detector arm.

    Bandwidth is B = R/2 and the acquisition time T = 1/R. RIN can be given
    either linearly (``rin``) or as ``rin_dbc_per_hz``.
    """

    nep: float = Field(default=5e-12, ge=0.0)  # W/sqrt(Hz)
    quantum_efficiency: float = Field(default=0.65, gt=0.0, le=1.0)
    wavelength: float = Field(default=975e-9, gt=0.0)  # meters
    rin: float = Field(default=rin_dbc_to_linear(-145.0), ge=0.0)  # 1/Hz
    clock_rate: float = Field(default=25e9, gt=0.0)  # samples/second

    # Switches for the stochastic model
    include_shot_noise: bool = True
    rin_common_mode: bool = False

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def accept_dbc(cls, data):
        if isinstance(data, dict) and "rin_dbc_per_hz" in data:
            data = dict(data)
            if "rin" in data:
                raise ValueError("Give either rin or rin_dbc_per_hz, not both")
            data["rin"] = rin_dbc_to_linear(data.pop("rin_dbc_per_hz"))
        return data

    @classmethod
    def from_dbc(cls, rin_dbc_per_hz: float, **kwargs) -> "NoiseParams":
        return cls(rin=rin_dbc_to_linear(rin_dbc_per_hz), **kwargs)

    @classmethod
    def silent(cls, clock_rate: float = 25e9) -> "NoiseParams":
        """Parameters with every noise source switched off."""
        return cls(nep=0.0, rin=0.0, include_shot_noise=False, clock_rate=clock_rate)

    @property
    def bandwidth(self) -> float:
        return self.clock_rate / 2.0

    @property
    def acquisition_time(self) -> float:
        return 1.0 / self.clock_rate

    @property
    def photon_energy(self) -> float:
        """h*nu = h*c/lambda in joules."""
        return constants.h * constants.c / self.wavelength

    @property
    def rin_dbc_per_hz(self) -> float:
        return rin_linear_to_dbc(self.rin) if self.rin > 0 else float("-inf")


# Reference 25 GS/s detection chain
REFERENCE_NOISE = NoiseParams(
    nep=5e-12,
    quantum_efficiency=0.65,
    wavelength=975e-9,
    rin=rin_dbc_to_linear(-145.0),
    clock_rate=25e9,
)
