"""
Throughput and energy-per-operation models of the optical core.

A cycle performs N x M MACs (2 N M operations). Power drawn per second:
    N (P_laser + E_DAC R) + N M P_SLM + M (E_TIA + E_ADC + E_NL) R
and the energy per operation is that power divided by 2 N M R.
"""
import logging

import pandas as pd
from pydantic import BaseModel, ConfigDict

from src.analysis.params import EnergyParams
from src.exceptions import DomainError

# Configure logger
logger = logging.getLogger(__name__)

FEMTO = 1e-15


def _check_positive(**values) -> None:
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")


def throughput(n_inputs: int, n_fanout: int, clock_rate: float) -> float:
    """Operations per second, T = 2 N M R (one MAC counts as two operations)."""
    _check_positive(n_inputs=n_inputs, n_fanout=n_fanout, clock_rate=clock_rate)
    return 2.0 * n_inputs * n_fanout * clock_rate


def convolution_rate(n_fanout: int, clock_rate: float) -> float:
    """Kernel evaluations per second: each of the M copies yields one output per cycle."""
    _check_positive(n_fanout=n_fanout, clock_rate=clock_rate)
    return float(n_fanout) * clock_rate


class EnergyBreakdown(BaseModel):
    """Per-component energy per operation in joules."""

    laser: float
    dac: float
    slm: float
    tia: float
    adc: float
    nonlinearity: float

    model_config = ConfigDict(frozen=True)

    @property
    def total(self) -> float:
        return self.laser + self.dac + self.slm + self.tia + self.adc + self.nonlinearity

    def as_dict(self) -> dict:
        return {**self.model_dump(), "total": self.total}


def energy_per_op(params: EnergyParams, n_inputs: int, n_fanout: int, clock_rate: float) -> EnergyBreakdown:
    """
    Energy per operation of a fully parallel N x M cycle.

    Args:
        params: Device energy costs
        n_inputs: N, number of VCSELs
        n_fanout: M, number of kernel copies / detector channels
        clock_rate: R in samples per second

    Returns:
        EnergyBreakdown, each row in joules per operation
    """
    ops_per_second = throughput(n_inputs, n_fanout, clock_rate)
    n, m, r = n_inputs, n_fanout, clock_rate

    return EnergyBreakdown(
        laser=n * params.laser_power_per_vcsel / ops_per_second,
        dac=n * params.dac_energy * r / ops_per_second,
        slm=n * m * params.slm_power_per_pixel / ops_per_second,
        tia=m * params.tia_energy * r / ops_per_second,
        adc=m * params.adc_energy * r / ops_per_second,
        nonlinearity=m * params.nonlinearity_energy * r / ops_per_second,
    )


def efficiency_tops_per_watt(energy_per_operation: float) -> float:
    """TOPS/W from joules per operation."""
    if energy_per_operation <= 0:
        raise DomainError(f"Energy per operation must be positive, got {energy_per_operation}")
    return 1.0 / (energy_per_operation * 1e12)


def energy_table(params: EnergyParams, n_inputs: int, n_fanout: int, clock_rate: float) -> pd.DataFrame:
    """
    Energy report as a table: one row per component plus a total row.

    Columns: component, energy_cost (device figure), unit, per_op_fj.
    """
    breakdown = energy_per_op(params, n_inputs, n_fanout, clock_rate)
    rows = [
        ("laser", params.laser_power_per_vcsel, "W", breakdown.laser),
        ("dac", params.dac_energy, "J", breakdown.dac),
        ("slm", params.slm_power_per_pixel, "W", breakdown.slm),
        ("tia", params.tia_energy, "J", breakdown.tia),
        ("adc", params.adc_energy, "J", breakdown.adc),
        ("nonlinearity", params.nonlinearity_energy, "J", breakdown.nonlinearity),
    ]
    frame = pd.DataFrame(
        [(name, cost, unit, per_op / FEMTO) for name, cost, unit, per_op in rows],
        columns=["component", "energy_cost", "unit", "per_op_fj"],
    )
    total = pd.DataFrame([("total", float("nan"), "", breakdown.total / FEMTO)], columns=frame.columns)
    frame = pd.concat([frame, total], ignore_index=True)

    logger.info(
        f"Energy per operation for N={n_inputs}, M={n_fanout}, R={clock_rate:g}: "
        f"{breakdown.total / FEMTO:.3f} fJ/OP"
    )
    return frame


def format_energy_table(frame: pd.DataFrame) -> str:
    """Aligned text rendering of energy_table output."""
    text = frame.copy()
    text["energy_cost"] = [
        "" if pd.isna(cost) else f"{cost:.3g} {unit}" for cost, unit in zip(frame["energy_cost"], frame["unit"])
    ]
    text["per_op_fj"] = [f"{value:.4g} fJ/OP" for value in frame["per_op_fj"]]
    return text.drop(columns="unit").to_string(index=False)
