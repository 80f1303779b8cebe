"""
Parameter sets of the analytical models: per-device energy costs and fanout optics.
"""
import math

from pydantic import BaseModel, ConfigDict, Field


class EnergyParams(BaseModel):
    """
    Per-device energy costs.

    Static powers (laser, SLM) are in watts; per-conversion costs are in joules.
    The laser figure is electrical, so wall-plug efficiency is already folded in.
    """

    laser_power_per_vcsel: float = Field(default=400e-6, ge=0.0)
    dac_energy: float = Field(default=0.5e-12, ge=0.0)
    slm_power_per_pixel: float = Field(default=3e-6, ge=0.0)
    tia_energy: float = Field(default=180e-15, ge=0.0)
    adc_energy: float = Field(default=0.8e-12, ge=0.0)
    nonlinearity_energy: float = Field(default=1e-12, ge=0.0)

    model_config = ConfigDict(frozen=True)


class GeometryParams(BaseModel):
    """Fanout optics: focusing lens, DOE order angle, source pitch and spot size (meters, radians)."""

    focal_length: float = Field(default=36.7e-3, gt=0.0)
    diffraction_angle_per_order: float = Field(default=math.radians(1.0), ge=0.0)
    source_pitch: float = Field(default=20e-6, gt=0.0)
    spot_diameter: float = Field(default=20e-6, gt=0.0)

    model_config = ConfigDict(frozen=True)


class SystemPreset(BaseModel):
    """One column of the energy table together with the array size and optics it assumes."""

    name: str
    n_inputs: int = Field(ge=1)
    n_fanout: int = Field(ge=1)
    clock_rate: float = Field(gt=0.0)
    copies_per_axis: int = Field(ge=1)
    energy: EnergyParams
    geometry: GeometryParams

    model_config = ConfigDict(frozen=True)


# 3x3 fanout of a 3x3 VCSEL block at 100 MS/s, lab optics (f = 400 mm, 0.26 deg per order)
CURRENT_SYSTEM = SystemPreset(
    name="current",
    n_inputs=9,
    n_fanout=9,
    clock_rate=1e8,
    copies_per_axis=3,
    energy=EnergyParams(),
    geometry=GeometryParams(
        focal_length=400e-3,
        diffraction_angle_per_order=math.radians(0.26),
        source_pitch=200e-6,
        spot_diameter=19.7e-6,
    ),
)

# 1000 x 1000 at 25 GS/s behind a 32x32 DOE (f = 36.7 mm, 1 deg per order)
NEAR_TERM_SYSTEM = SystemPreset(
    name="near-term",
    n_inputs=1000,
    n_fanout=1000,
    clock_rate=25e9,
    copies_per_axis=32,
    energy=EnergyParams(
        laser_power_per_vcsel=5e-3,
        dac_energy=0.5e-12,
        slm_power_per_pixel=3e-6,
        tia_energy=170e-15,
        adc_energy=2e-12,
        nonlinearity_energy=1e-12,
    ),
    geometry=GeometryParams(),
)

PRESETS = {preset.name: preset for preset in (CURRENT_SYSTEM, NEAR_TERM_SYSTEM)}
