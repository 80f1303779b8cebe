"""
CSV export of calibrated lookup tables.
"""
import logging
from pathlib import Path
from typing import Union

import pandas as pd

from config.settings import CSV_FLOAT_FORMAT
from src.calibration.device import SlmDeviceModel
from src.calibration.lut import WeightLut, realized_weight

# Configure logger
logger = logging.getLogger(__name__)


def lut_frame(lut: WeightLut, device: SlmDeviceModel, channel: int = 0) -> pd.DataFrame:
    return pd.DataFrame({
        "weight_knot": lut.knots,
        "gray_level": lut.table,
        "realized_weight": realized_weight(device, lut.table, channel),
    })


def write_lut(path: Union[str, Path], lut: WeightLut, device: SlmDeviceModel, channel: int = 0) -> Path:
    """Write weight_knot, gray_level, realized_weight rows."""
    path = Path(path)
    lut_frame(lut, device, channel).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {len(lut.knots)}-knot LUT to {path}")
    return path
