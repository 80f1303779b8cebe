"""
CSV export of detector readouts.
"""
import logging
from pathlib import Path
from typing import Iterable, Union

import numpy as np
import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src.hardware.optics import DetectorReadout

# Configure logger
logger = logging.getLogger(__name__)


def readouts_frame(readouts: Union[DetectorReadout, Iterable[DetectorReadout]]) -> pd.DataFrame:
    """
    Flatten readouts into rows of (frame_index, channel, analog, digital).

    Args:
        readouts: A batch readout or an iterable of single-frame readouts

    Returns:
        DataFrame in frame-major, channel-minor order
    """
    if isinstance(readouts, DetectorReadout):
        readouts = list(readouts.frames())

    analog = np.stack([np.atleast_1d(r.analog) for r in readouts])
    digital = np.stack([np.atleast_1d(r.digital) for r in readouts])
    n_frames, n_channels = analog.shape

    return pd.DataFrame({
        "frame_index": np.repeat(np.arange(n_frames), n_channels),
        "channel": np.tile(np.arange(n_channels), n_frames),
        "analog": analog.ravel(),
        "digital": digital.ravel(),
    })


def write_readouts(path: Union[str, Path], readouts) -> Path:
    """Write readouts as CSV with 17 significant digits."""
    path = Path(path)
    frame = readouts_frame(readouts)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(frame)} readout rows to {path}")
    return path
