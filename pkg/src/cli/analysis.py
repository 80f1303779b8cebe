"""
Analytical and calibration commands: SNR curve, energy report and SLM calibration.
"""
import logging
from typing import Optional

import click
import numpy as np

from config.settings import CSV_FLOAT_FORMAT
from src.analysis.energy import (
    efficiency_tops_per_watt,
    energy_per_op,
    energy_table,
    format_energy_table,
    throughput
)
from src.analysis.geometry import fanout_geometry
from src.analysis.params import PRESETS
from src.calibration.export import write_lut
from src.calibration.lut import calibrate_device, calibration_residuals, default_grid, recalibrate
from src.cli.common import common_options, experiment_command, slm_device, write_json
from src.exceptions import InfeasibleError
from src.noise.snr import required_power, rin_plateau_snr, snr_curve as run_snr_curve, snr_total
from src.seeds import substream

# Configure logger
logger = logging.getLogger(__name__)


@click.command("snr-curve")
@common_options
@click.option("--min-power", type=click.FloatRange(min=0.0, min_open=True), default=1e-9, show_default=True,
              help="Lowest arm power (W)")
@click.option("--max-power", type=click.FloatRange(min=0.0, min_open=True), default=1.0, show_default=True,
              help="Highest arm power (W)")
@click.option("--points", type=click.IntRange(min=2), default=91, show_default=True)
@experiment_command("snr-curve")
def snr_curve(run, min_power: float, max_power: float, points: int):
    """Detector, shot, RIN and total SNR over a power sweep; writes snr_curve.csv."""
    if max_power <= min_power:
        raise click.BadParameter("--max-power must exceed --min-power")

    params = run.config.noise
    powers = np.logspace(np.log10(min_power), np.log10(max_power), points)
    frame = run_snr_curve(params, powers)
    frame.to_csv(run.path("snr_curve.csv"), index=False, float_format=CSV_FLOAT_FORMAT)

    snr_1mw, bits_1mw = snr_total(1e-3, params)
    logger.info(f"SNR at 1 mW: {snr_1mw:.1f} ({bits_1mw:.2f} bits); RIN plateau {rin_plateau_snr(params):.1f}")
    try:
        logger.info(f"Power for 7 effective bits: {required_power(7.0, params):.3e} W")
    except InfeasibleError as e:
        logger.warning(e.detail)


@click.command("energy-report")
@common_options
@click.option("--preset", type=click.Choice(sorted(PRESETS)), default="current", show_default=True,
              help="System column supplying defaults")
@click.option("--n-inputs", type=click.IntRange(min=1), default=None, help="Override N")
@click.option("--n-fanout", type=click.IntRange(min=1), default=None, help="Override M")
@click.option("--clock-rate", type=click.FloatRange(min=0.0, min_open=True), default=None, help="Override R")
@click.option("--copies-per-axis", type=click.IntRange(min=1), default=None, help="Override fanout copies per axis")
@experiment_command("energy-report")
def energy_report(run, preset: str, n_inputs: Optional[int], n_fanout: Optional[int], clock_rate: Optional[float],
                  copies_per_axis: Optional[int]):
    """Energy-per-operation table, throughput and fanout geometry; writes energy_report.csv/.txt."""
    system = PRESETS[preset]
    n = n_inputs or system.n_inputs
    m = n_fanout or system.n_fanout
    r = clock_rate or system.clock_rate
    copies = copies_per_axis or system.copies_per_axis

    run.config = run.config.model_copy(update={
        "energy": run.config.energy or system.energy,
        "geometry": run.config.geometry or system.geometry,
    })

    table = energy_table(run.config.energy, n, m, r)
    table.to_csv(run.path("energy_report.csv"), index=False, float_format=CSV_FLOAT_FORMAT)

    total = energy_per_op(run.config.energy, n, m, r).total
    layout = fanout_geometry(run.config.geometry, copies)
    lines = [
        f"System: {preset} (N={n}, M={m}, R={r:g} S/s)",
        "",
        format_energy_table(table),
        "",
        f"Throughput: {throughput(n, m, r):.4g} OPS",
        f"Efficiency: {efficiency_tops_per_watt(total):.4g} TOPS/W" if total > 0 else "Efficiency: unbounded",
        f"Fanout spot spacing: {layout.spot_spacing * 1e6:.1f} um, "
        f"extent {layout.array_extent * 1e3:.2f} mm, margin {layout.crosstalk_margin:.1f} spot diameters"
        + (" (crosstalk warning)" if layout.crosstalk_warning else ""),
    ]
    run.path("energy_report.txt").write_text("\n".join(lines) + "\n")
    logger.info(f"Energy report: {total * 1e15:.3f} fJ/OP")


@click.command("calibrate")
@common_options
@click.option("--noise-std", type=click.FloatRange(min=0.0), default=None, help="Override calibration.noise_std")
@click.option("--repeats", type=click.IntRange(min=1), default=None, help="Override calibration.repeats")
@click.option("--phase-offset", type=float, default=None,
              help="Drift (rad) applied to the device after the initial calibration")
@click.option("--subset-fraction", type=click.FloatRange(min=0.0, max=1.0, min_open=True), default=None,
              help="Recalibrate the drifted device re-measuring this fraction of gray levels")
@experiment_command("calibrate")
def calibrate(run, noise_std: Optional[float], repeats: Optional[int], phase_offset: Optional[float],
              subset_fraction: Optional[float]):
    """Calibrate the simulated SLM; writes lut.csv and calibration_report.json."""
    overrides = {
        "noise_std": noise_std,
        "repeats": repeats,
        "phase_offset": phase_offset,
        "subset_fraction": subset_fraction,
    }
    settings = run.config.calibration.model_copy(update={k: v for k, v in overrides.items() if v is not None})
    run.config = run.config.model_copy(update={"calibration": settings})

    device = slm_device(settings)
    rng = substream(run.seed, "calibration-noise")
    lut = calibrate_device(device, settings.noise_std, settings.repeats, rng, target_grid=default_grid(settings.knots))
    report = {"initial": calibration_residuals(lut, device)}

    if settings.phase_offset:
        device = device.with_phase_offset(settings.phase_offset)
        report["drifted"] = calibration_residuals(lut, device)
        if settings.subset_fraction is not None:
            lut = recalibrate(device, lut, settings.subset_fraction, settings.noise_std, rng)
            report["recalibrated"] = calibration_residuals(lut, device)

    report["gain_map"] = None if lut.gain_map is None else lut.gain_map.tolist()
    write_lut(run.path("lut.csv"), lut, device)
    write_json(run.path("calibration_report.json"), report)
