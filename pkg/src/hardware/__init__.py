"""
Behavioral model of the optical MVM core: VCSEL encoding, DOE fanout, SLM weighting and balanced detection.
"""

from src.hardware.config import HardwareConfig, get_hardware_config
from src.hardware.encoding import InputFrame, encode_input, encode_inputs, weight_to_phase, phase_to_weight
from src.hardware.optics import (
    WeightPlane,
    DetectorReadout,
    fanout_replicate,
    optical_mvm,
    optical_mvm_batch,
    quantization_bound
)
from src.hardware.export import write_readouts
from src.hardware.batch import optical_matmul

__all__ = [
    'HardwareConfig',
    'get_hardware_config',
    'InputFrame',
    'encode_input',
    'encode_inputs',
    'weight_to_phase',
    'phase_to_weight',
    'WeightPlane',
    'DetectorReadout',
    'fanout_replicate',
    'optical_mvm',
    'optical_mvm_batch',
    'quantization_bound',
    'write_readouts',
    'optical_matmul'
]
