"""
CNN commands: train, infer and the activation-noise sweep.
"""
import logging
from typing import Optional

import click
import numpy as np

from config.settings import CSV_FLOAT_FORMAT
from src.cli.common import RunContext, calibrated_slm, common_options, experiment_command, write_json
from src.convnet.backends import OpticalSetup
from src.convnet.config import Backend, TrainConfig
from src.convnet.export import write_confusion, write_history
from src.convnet.model import CnnModel, load_checkpoint, save_checkpoint
from src.convnet.training import DEFAULT_SWEEP_SUBSET, evaluate, noise_sweep as run_noise_sweep, train as run_train
from src.datasets.idx import ImageSet, load_dataset
from src.exceptions import ConfigError
from src.seeds import frame_rng, substream_seed

# Configure logger
logger = logging.getLogger(__name__)

DATASETS = ["mnist", "fashion-mnist"]
BACKENDS = [backend.value for backend in Backend]
SPLITS = ["train", "test"]


def _load(name: str, split: str, data_dir: Optional[str], subset: Optional[int], seed: int) -> ImageSet:
    image_set = load_dataset(name, split, data_dir)
    if subset is not None:
        image_set = image_set.subset(subset, seed=frame_rng(substream_seed(seed, "subset"), SPLITS.index(split)))
    logger.info(f"Loaded {len(image_set)} {name}/{split} images")
    return image_set


def _optical(run: RunContext, backend: str, output_error: Optional[float],
             calibrated: bool = False) -> Optional[OpticalSetup]:
    """
    Optical setup for the optical-sim backend: noiseless unless an output error is given,
    closed-form SLM phases unless a calibrated LUT is requested.
    """
    if Backend(backend) != Backend.OPTICAL:
        if calibrated:
            logger.warning("--calibrated only affects the optical-sim backend")
        return None
    hardware = run.config.hardware
    if (hardware.n_inputs, hardware.n_fanout) != (9, 9):
        raise ConfigError("The optical CNN backend needs a 9-input, 9-copy hardware config")

    slm = {}
    if calibrated:
        device, lut = calibrated_slm(run)
        slm = {"device": device, "lut": lut}
    if output_error is None:
        return OpticalSetup(hardware=hardware, **slm)
    return OpticalSetup.at_output_error(output_error, hardware=hardware, **slm)


def _dataset_options(func):
    options = [
        click.option("--dataset", type=click.Choice(DATASETS), default="mnist", show_default=True),
        click.option("--data-dir", type=click.Path(file_okay=False), default=None,
                     help="Dataset root, defaults to FASTONN_DATA_DIR"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.command("train")
@common_options
@_dataset_options
@click.option("--epochs", type=click.IntRange(min=1), default=None, help="Override training.epochs")
@click.option("--batch-size", type=click.IntRange(min=1), default=None, help="Override training.batch_size")
@click.option("--learning-rate", type=click.FloatRange(min=0.0, min_open=True), default=None,
              help="Override training.learning_rate")
@click.option("--backend", type=click.Choice(BACKENDS), default=None, help="Override training.backend")
@click.option("--noise-sigma", type=click.FloatRange(min=0.0), default=None, help="Override training.noise_sigma")
@click.option("--output-error", type=click.FloatRange(min=0.0), default=None,
              help="Optical MVM error std the detector noise is tuned to (optical-sim only)")
@click.option("--train-subset", type=click.IntRange(min=1), default=None, help="Train on a seeded subset")
@click.option("--test-subset", type=click.IntRange(min=1), default=None, help="Test on a seeded subset")
@click.option("--calibrated", is_flag=True, default=False, help="Drive the optical kernels through a calibrated LUT")
@experiment_command("train")
def train(run, dataset, data_dir, epochs, batch_size, learning_rate, backend, noise_sigma, output_error,
          train_subset, test_subset, calibrated):
    """Train the CNN and write model.fonn plus history.csv."""
    overrides = {
        "epochs": epochs,
        "batch_size": batch_size,
        "learning_rate": learning_rate,
        "backend": backend,
        "noise_sigma": noise_sigma,
    }
    training = TrainConfig(**{
        **run.config.training.model_dump(),
        **{k: v for k, v in overrides.items() if v is not None},
    })
    run.config = run.config.model_copy(update={"training": training})

    train_set = _load(dataset, "train", data_dir, train_subset, run.seed)
    test_set = _load(dataset, "test", data_dir, test_subset, run.seed)
    optical = _optical(run, training.backend.value, output_error, calibrated)

    model = CnnModel.initialize(substream_seed(run.seed, "init"))
    model, history = run_train(model, train_set, training, test_set, optical, progress=run.progress)

    save_checkpoint(run.path("model.fonn"), model)
    write_history(run.path("history.csv"), history)


@click.command("infer")
@common_options
@_dataset_options
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--split", type=click.Choice(["train", "test"]), default="test", show_default=True)
@click.option("--subset", type=click.IntRange(min=1), default=None, help="Evaluate a seeded subset")
@click.option("--backend", type=click.Choice(BACKENDS), default=Backend.DIGITAL.value, show_default=True)
@click.option("--noise-sigma", type=click.FloatRange(min=0.0), default=0.0, show_default=True)
@click.option("--output-error", type=click.FloatRange(min=0.0), default=None,
              help="Optical MVM error std the detector noise is tuned to (optical-sim only)")
@click.option("--calibrated", is_flag=True, default=False, help="Drive the optical kernels through a calibrated LUT")
@experiment_command("infer")
def infer(run, dataset, data_dir, checkpoint, split, subset, backend, noise_sigma, output_error, calibrated):
    """Classify a dataset split and write confusion.csv plus metrics.json."""
    model = load_checkpoint(checkpoint)
    image_set = _load(dataset, split, data_dir, subset, run.seed)
    optical = _optical(run, backend, output_error, calibrated)

    result = evaluate(model, image_set, backend, noise_sigma, run.seed, optical, progress=run.progress)

    write_confusion(run.path("confusion.csv"), result.confusion)
    write_json(run.path("metrics.json"), {
        "accuracy": result.accuracy,
        "images": len(image_set),
        "backend": backend,
        "noise_sigma": noise_sigma,
        "output_error": output_error,
        "calibrated": calibrated,
        "per_class_accuracy": (np.diag(result.confusion) / np.maximum(result.confusion.sum(axis=1), 1)).tolist(),
    })


@click.command("noise-sweep")
@common_options
@_dataset_options
@click.option("--checkpoint", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--sigma", "sigmas", type=click.FloatRange(min=0.0), multiple=True,
              help="Activation noise std to evaluate (repeatable), defaults to 0..0.5 plus 0.037")
@click.option("--subset", type=click.IntRange(min=1), default=DEFAULT_SWEEP_SUBSET, show_default=True)
@click.option("--backend", type=click.Choice(BACKENDS), default=Backend.DIGITAL.value, show_default=True)
@click.option("--calibrated", is_flag=True, default=False, help="Drive the optical kernels through a calibrated LUT")
@experiment_command("noise-sweep")
def noise_sweep(run, dataset, data_dir, checkpoint, sigmas, subset, backend, calibrated):
    """Accuracy against activation-noise std; writes noise_sweep.csv."""
    model = load_checkpoint(checkpoint)
    image_set = load_dataset(dataset, "test", data_dir)
    optical = _optical(run, backend, None, calibrated)

    frame = run_noise_sweep(
        model,
        image_set,
        sigmas=list(sigmas) or None,
        seed=run.seed,
        backend=backend,
        optical=optical,
        subset=subset,
        progress=run.progress,
    )
    frame.to_csv(run.path("noise_sweep.csv"), index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(frame)} sweep points to {run.path('noise_sweep.csv')}")
