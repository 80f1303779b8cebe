"""
SLM calibration: device model, monotone LUT fitting, flat-field gains and recalibration.
"""

from src.calibration.device import SlmDeviceModel, measure_response
from src.calibration.lut import (
    WeightLut,
    build_lut,
    flat_field,
    recalibrate,
    calibrate_device,
    calibration_residuals,
    realized_weight,
    default_grid
)
from src.calibration.export import write_lut

__all__ = [
    'SlmDeviceModel',
    'measure_response',
    'WeightLut',
    'build_lut',
    'flat_field',
    'recalibrate',
    'calibrate_device',
    'calibration_residuals',
    'realized_weight',
    'default_grid',
    'write_lut'
]
