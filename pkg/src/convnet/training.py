"""
Loss, digital backpropagation, Adam training loop, evaluation and the activation-noise sweep.
"""
import logging
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict
from scipy.special import logsumexp
from tqdm import tqdm

from config import settings
from src.convnet.backends import OpticalSetup
from src.convnet.config import Backend, TrainConfig
from src.convnet.layers import ForwardResult, forward_batch
from src.convnet.model import CnnModel, GRID, KERNEL_SIZE, N_CLASSES, N_KERNELS
from src.convnet.optim import Adam
from src.datasets.idx import ImageSet
from src.exceptions import EmptyDatasetError, LabelError
from src.seeds import frame_rng, substream_seed

# Configure logger
logger = logging.getLogger(__name__)

# Activation noise operating point matched to the optical MVM error
OPERATING_SIGMA = 0.037
DEFAULT_SWEEP_SUBSET = 2000
EVAL_CHUNK = 256


class Gradients(NamedTuple):
    conv: np.ndarray   # (9, 3, 3)
    dense: np.ndarray  # (900, 10)


class EpochRecord(BaseModel):
    epoch: int
    train_loss: float
    train_acc: float
    test_acc: Optional[float] = None


class EvaluationResult(BaseModel):
    """Accuracy and confusion matrix (rows = true class, columns = predicted class)."""

    accuracy: float
    confusion: Any
    predictions: Any

    model_config = ConfigDict(arbitrary_types_allowed=True)


def _check_labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
        raise LabelError("Labels must be a vector of integer class indices")
    if labels.size and (labels.min() < 0 or labels.max() >= N_CLASSES):
        bad = labels[(labels < 0) | (labels >= N_CLASSES)][0]
        raise LabelError(f"Label {bad} is outside 0..{N_CLASSES - 1}")
    return labels.astype(np.int64)


def _backprop(model: CnnModel, result: ForwardResult, labels: np.ndarray) -> Tuple[float, Gradients]:
    batch = len(labels)
    if batch != len(result.logits):
        raise LabelError(f"{batch} labels for {len(result.logits)} images")

    rows = np.arange(batch)
    log_probs = result.logits - logsumexp(result.logits, axis=1, keepdims=True)
    loss = float(-log_probs[rows, labels].mean())

    d_logits = result.probabilities.copy()
    d_logits[rows, labels] -= 1.0
    d_logits /= batch

    d_dense = result.features.T @ d_logits
    d_features = d_logits @ model.dense_weights.T
    d_act = d_features.reshape(batch, N_KERNELS, GRID * GRID).transpose(0, 2, 1)
    d_pre = d_act * result.relu_mask
    # Fixed summation order over (image, patch)
    d_conv = np.einsum("bpk,bpn->kn", d_pre, result.patches)

    return loss, Gradients(conv=d_conv.reshape(N_KERNELS, KERNEL_SIZE, KERNEL_SIZE), dense=d_dense)


def loss_and_grads(
        model: CnnModel,
        images,
        labels,
        config: Optional[TrainConfig] = None,
        optical: Optional[OpticalSetup] = None,
        keys: Optional[Sequence[Sequence[int]]] = None
) -> Tuple[float, Gradients]:
    """
    Mean sparse categorical cross-entropy and its exact gradients.

    The forward uses config.backend. Backpropagation is always digital: the dense
    gradient uses the forward activations, the ReLU gate comes from the forward
    pre-activations and the conv gradient is taken through the same patch matrix.

    Args:
        model: Current parameters
        images: Array (B, 28, 28) in [0, 1]
        labels: Array (B,) of class indices
        config: Backend, activation noise and seed
        optical: Hardware for the optical backend
        keys: Per-image generator keys

    Returns:
        Tuple (loss, Gradients)

    Raises:
        LabelError: Label outside 0..9
    """
    config = config or TrainConfig()
    labels = _check_labels(labels)
    result = forward_batch(model, images, config.backend, config.noise_sigma, config.seed, keys, optical)
    return _backprop(model, result, labels)


def train(
        model: CnnModel,
        dataset: ImageSet,
        config: Optional[TrainConfig] = None,
        test_set: Optional[ImageSet] = None,
        optical: Optional[OpticalSetup] = None,
        progress: bool = True
) -> Tuple[CnnModel, List[EpochRecord]]:
    """
    Train with Adam, clipping conv weights after every update.

    The shuffle order of each epoch comes from the seed, so a fixed seed gives a
    bit-identical history. Training accuracy counts the predictions of the forward
    pass that produced each batch's loss; test accuracy is measured after the epoch
    on the same backend without activation noise.

    Returns:
        Tuple (trained copy of the model, per-epoch history)

    Raises:
        EmptyDatasetError: No training images
    """
    config = config or TrainConfig()
    if len(dataset) == 0:
        raise EmptyDatasetError("Training set is empty")

    model = model.clone()
    model.clip_conv()
    optimizer = Adam(config)
    images = dataset.normalized
    labels = dataset.labels.astype(np.int64)
    shuffle_seed = substream_seed(config.seed, "shuffle")
    history: List[EpochRecord] = []

    logger.info(
        f"Training on {len(dataset)} images for {config.epochs} epochs "
        f"(backend={config.backend.value}, batch_size={config.batch_size}, sigma={config.noise_sigma})"
    )

    for epoch in range(config.epochs):
        order = frame_rng(shuffle_seed, epoch).permutation(len(dataset))
        total_loss = 0.0
        correct = 0

        starts = range(0, len(order), config.batch_size)
        for start in tqdm(starts, desc=f"epoch {epoch + 1}/{config.epochs}", disable=not progress, leave=False):
            index = order[start:start + config.batch_size]
            keys = [(epoch, int(i)) for i in index]
            result = forward_batch(
                model, images[index], config.backend, config.noise_sigma, config.seed, keys, optical
            )
            loss, grads = _backprop(model, result, labels[index])
            optimizer.step(model, grads)

            total_loss += loss * len(index)
            correct += int(np.sum(result.labels == labels[index]))
            logger.debug(f"Epoch {epoch + 1} batch {start // config.batch_size}: loss={loss:.4f}")

        record = EpochRecord(
            epoch=epoch + 1,
            train_loss=total_loss / len(dataset),
            train_acc=correct / len(dataset),
        )
        if test_set is not None and len(test_set):
            record.test_acc = evaluate(model, test_set, config.backend, 0.0, config.seed, optical).accuracy
        history.append(record)

        test_part = "" if record.test_acc is None else f", test_acc={record.test_acc:.4f}"
        logger.info(
            f"Epoch {record.epoch}/{config.epochs}: loss={record.train_loss:.4f}, "
            f"train_acc={record.train_acc:.4f}{test_part}"
        )

    return model, history


def _predict_chunk(model, images, index, backend, noise_sigma, seed, optical) -> np.ndarray:
    keys = [(int(i),) for i in index]
    return forward_batch(model, images[index], backend, noise_sigma, seed, keys, optical).labels


def evaluate(
        model: CnnModel,
        dataset: ImageSet,
        backend: Union[Backend, str] = Backend.DIGITAL,
        noise_sigma: float = 0.0,
        seed: Optional[int] = None,
        optical: Optional[OpticalSetup] = None,
        n_jobs: Optional[int] = None,
        progress: bool = False
) -> EvaluationResult:
    """
    Classify a dataset and tabulate the confusion matrix.

    Image i always draws its noise from the generator keyed by (seed, i), so the
    result does not depend on the chunking or the number of workers.

    Args:
        model: Trained model
        dataset: Labelled images
        backend: "digital" or "optical-sim"
        noise_sigma: Activation noise std
        seed: Base seed
        optical: Hardware for the optical backend
        n_jobs: joblib workers, FASTONN_THREADS if None
        progress: Show a progress bar

    Returns:
        EvaluationResult
    """
    if len(dataset) == 0:
        raise EmptyDatasetError("Evaluation set is empty")

    images = dataset.normalized
    labels = dataset.labels.astype(np.int64)
    chunks = [np.arange(s, min(s + EVAL_CHUNK, len(dataset))) for s in range(0, len(dataset), EVAL_CHUNK)]

    workers = Parallel(n_jobs=n_jobs if n_jobs is not None else settings.n_jobs(), prefer="threads")
    parts = workers(
        delayed(_predict_chunk)(model, images, index, backend, noise_sigma, seed, optical)
        for index in tqdm(chunks, desc="evaluate", disable=not progress, leave=False)
    )
    predictions = np.concatenate(parts)

    confusion = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(confusion, (labels, predictions), 1)
    accuracy = float(np.trace(confusion) / confusion.sum())

    logger.info(f"Evaluated {len(dataset)} images on {Backend(backend).value}: accuracy={accuracy:.4f}")
    return EvaluationResult(accuracy=accuracy, confusion=confusion, predictions=predictions)


def default_sigmas() -> np.ndarray:
    """0 to 0.5 in six steps, plus the 0.037 operating point."""
    return np.union1d(np.linspace(0.0, 0.5, 6), [OPERATING_SIGMA])


def noise_sweep(
        model: CnnModel,
        dataset: ImageSet,
        sigmas: Optional[Sequence[float]] = None,
        seed: int = 0,
        backend: Union[Backend, str] = Backend.DIGITAL,
        optical: Optional[OpticalSetup] = None,
        subset: Optional[int] = DEFAULT_SWEEP_SUBSET,
        progress: bool = False
) -> pd.DataFrame:
    """
    Accuracy as a function of the activation-noise std.

    Returns:
        DataFrame with columns sigma, accuracy
    """
    sigmas = default_sigmas() if sigmas is None else np.asarray(sigmas, dtype=float)
    if subset is not None and len(dataset) > subset:
        dataset = dataset.subset(subset, seed=substream_seed(seed, "subset"))

    rows = []
    for sigma in tqdm(sigmas, desc="noise sweep", disable=not progress):
        result = evaluate(model, dataset, backend, float(sigma), seed, optical)
        rows.append({"sigma": float(sigma), "accuracy": result.accuracy})
        logger.info(f"sigma={sigma:.4f}: accuracy={result.accuracy:.4f}")

    return pd.DataFrame(rows, columns=["sigma", "accuracy"])
