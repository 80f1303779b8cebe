"""
CSV export of training history and confusion matrices.
"""
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src.convnet.training import EpochRecord

# Configure logger
logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_loss", "train_acc", "test_acc"]


def history_frame(history: Sequence[EpochRecord]) -> pd.DataFrame:
    return pd.DataFrame([record.model_dump() for record in history], columns=HISTORY_COLUMNS)


def write_history(path: Union[str, Path], history: Sequence[EpochRecord]) -> Path:
    """Write (epoch, train_loss, train_acc, test_acc); test_acc is blank when no test set was given."""
    path = Path(path)
    history_frame(history).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(history)} epochs of history to {path}")
    return path


def write_confusion(path: Union[str, Path], confusion: np.ndarray) -> Path:
    """Rows are true classes, columns predicted classes."""
    path = Path(path)
    labels = [str(i) for i in range(confusion.shape[0])]
    frame = pd.DataFrame(confusion, index=pd.Index(labels, name="true"), columns=labels)
    frame.to_csv(path)
    logger.info(f"Wrote confusion matrix to {path}")
    return path
