"""
Analytical throughput, energy-per-operation and fanout-geometry models.
"""

from src.analysis.params import EnergyParams, GeometryParams, SystemPreset, CURRENT_SYSTEM, NEAR_TERM_SYSTEM, PRESETS
from src.analysis.energy import (
    EnergyBreakdown,
    throughput,
    convolution_rate,
    energy_per_op,
    efficiency_tops_per_watt,
    energy_table,
    format_energy_table
)
from src.analysis.geometry import FanoutLayout, fanout_geometry

__all__ = [
    'EnergyParams',
    'GeometryParams',
    'SystemPreset',
    'CURRENT_SYSTEM',
    'NEAR_TERM_SYSTEM',
    'PRESETS',
    'EnergyBreakdown',
    'throughput',
    'convolution_rate',
    'energy_per_op',
    'efficiency_tops_per_watt',
    'energy_table',
    'format_energy_table',
    'FanoutLayout',
    'fanout_geometry'
]
