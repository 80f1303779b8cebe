"""
Hardware commands: random signed MVM benchmark and optical edge detection.
"""
import logging
from typing import Optional

import click
import numpy as np
import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src.cli.common import calibrated_slm, common_options, experiment_command, write_json
from src.convnet.backends import DEFAULT_OUTPUT_ERROR
from src.datasets.edges import edge_detect as run_edge_detect, edge_hardware_config, edge_image
from src.datasets.idx import load_dataset
from src.datasets.images import read_image, write_image
from src.hardware.config import HardwareConfig
from src.hardware.encoding import encode_inputs
from src.hardware.export import write_readouts
from src.hardware.optics import WeightPlane, optical_mvm_batch, quantization_bound
from src.noise.snr import noise_for_output_error
from src.seeds import frame_rng, substream, substream_seed

# Configure logger
logger = logging.getLogger(__name__)


@click.command("mvm-bench")
@common_options
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True,
              help="Random input vectors pushed through one random weight plane")
@click.option("--noiseless", is_flag=True, default=False, help="Disable detector noise")
@click.option("--output-error", type=click.FloatRange(min=0.0), default=DEFAULT_OUTPUT_ERROR, show_default=True,
              help="Per-output error std (fraction of the unit output) the detector noise is tuned to")
@click.option("--crosstalk", type=click.FloatRange(min=0.0, max=0.2), default=None, help="Override hardware.crosstalk")
@click.option("--dac-bits", type=click.IntRange(min=1, max=16), default=None, help="Override hardware.dac_bits")
@click.option("--adc-bits", type=click.IntRange(min=1, max=16), default=None, help="Override hardware.adc_bits")
@click.option("--calibrated", is_flag=True, default=False,
              help="Drive the weights through a calibrated LUT on the simulated SLM")
@experiment_command("mvm-bench")
def mvm_bench(run, trials: int, noiseless: bool, output_error: float, crosstalk: Optional[float],
              dac_bits: Optional[int], adc_bits: Optional[int], calibrated: bool):
    """Random signed matrix-vector products against the exact result."""
    overrides = {"crosstalk": crosstalk, "dac_bits": dac_bits, "adc_bits": adc_bits}
    hardware = HardwareConfig(**{
        **run.config.hardware.model_dump(),
        **{k: v for k, v in overrides.items() if v is not None},
    })
    run.config = run.config.model_copy(update={"hardware": hardware})

    workload = substream(run.seed, "workload")
    weights = workload.uniform(-1.0, 1.0, (hardware.n_fanout, hardware.n_inputs))
    inputs = workload.uniform(0.0, 1.0, (trials, hardware.n_inputs))

    lut_step = 0.0
    if calibrated:
        device, lut = calibrated_slm(run)
        plane = WeightPlane.from_lut(weights, lut, device)
        lut_step = max(lut.max_step(device, m) for m in range(hardware.n_fanout))
    else:
        plane = WeightPlane.ideal(weights)

    noise = None if noiseless else noise_for_output_error(output_error, hardware, base=run.config.noise)
    frames = encode_inputs(inputs, hardware)
    readout = optical_mvm_batch(frames, plane, hardware, noise, substream_seed(run.seed, "hardware-noise"))

    exact = (inputs @ (weights * hardware.efficiencies[:, np.newaxis]).T)
    error = readout.dequantized() - exact
    summary = {
        "trials": trials,
        "n_inputs": hardware.n_inputs,
        "n_fanout": hardware.n_fanout,
        "noiseless": noiseless,
        "calibrated": calibrated,
        "target_output_error": None if noiseless else output_error,
        # errors are in units of the unit output (one full-power input through a unit weight)
        "mean_error": float(error.mean()),
        "error_std": float(error.std()),
        "mean_abs_error": float(np.abs(error).mean()),
        "max_abs_error": float(np.abs(error).max()),
        "full_scale": hardware.full_scale,
        "error_std_over_full_scale": float(error.std() / hardware.full_scale),
        "lut_max_step": lut_step,
        "quantization_bound": quantization_bound(hardware, lut_step),
        "noise_seed": readout.seed_used,
    }

    write_readouts(run.path("mvm_readouts.csv"), readout)
    write_json(run.path("mvm_summary.json"), summary)
    logger.info(f"MVM bench: error std {summary['error_std']:.4f} over {trials * hardware.n_fanout} outputs")


@click.command("edge-detect")
@common_options
@click.option("--image", "images", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Grayscale image(s) to process (PGM, PNG, JPEG, ...)")
@click.option("--dataset", type=click.Choice(["mnist", "fashion-mnist"]), default=None,
              help="Take images from an IDX dataset instead")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None, help="Dataset root directory")
@click.option("--count", type=click.IntRange(min=1), default=10, show_default=True,
              help="Dataset images to process")
@click.option("--backend", type=click.Choice(["digital", "optical"]), default="optical", show_default=True)
@click.option("--noiseless", is_flag=True, default=False, help="Disable detector noise")
@click.option("--output-error", type=click.FloatRange(min=0.0), default=DEFAULT_OUTPUT_ERROR, show_default=True,
              help="Per-output error std the detector noise is tuned to")
@experiment_command("edge-detect")
def edge_detect(run, images, dataset: Optional[str], data_dir: Optional[str], count: int, backend: str,
                noiseless: bool, output_error: float):
    """Laplacian edge detection through a single-copy optical core."""
    if images:
        inputs = [read_image(path) for path in images]
        names = list(images)
    elif dataset is not None:
        image_set = load_dataset(dataset, "test", data_dir).head(count)
        inputs = list(image_set.normalized)
        names = [f"{dataset}:{i}" for i in range(len(inputs))]
    else:
        raise click.UsageError("Give --image or --dataset")

    hardware = edge_hardware_config(run.config.hardware)
    noise = None if noiseless else noise_for_output_error(output_error, hardware, base=run.config.noise)
    hw_seed = substream_seed(run.seed, "hardware-noise")

    rows = []
    for index, (name, image) in enumerate(zip(names, inputs)):
        result = run_edge_detect(image, backend, noise, hardware, frame_rng(hw_seed, index))
        rows.append({"image": name, "agreement": result.agreement})
        if index == 0:
            write_image(run.path("edges.pgm"), edge_image(result.edge_map))

    frame = pd.DataFrame(rows, columns=["image", "agreement"])
    frame.to_csv(run.path("edge_agreement.csv"), index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Edge detection over {len(rows)} image(s): mean agreement {frame['agreement'].mean():.4f}")
