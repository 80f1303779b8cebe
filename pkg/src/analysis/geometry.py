"""
Fanout geometry on the weighting plane.
"""
import logging
import math

from pydantic import BaseModel, ConfigDict

from src.analysis.params import GeometryParams
from src.exceptions import DomainError

# Configure logger
logger = logging.getLogger(__name__)

# Spots closer than this many diameters are flagged
CROSSTALK_MARGIN_THRESHOLD = 3.0


class FanoutLayout(BaseModel):
    spot_spacing: float  # meters
    array_extent: float  # meters, first to last copy along one axis
    crosstalk_margin: float
    crosstalk_warning: bool

    model_config = ConfigDict(frozen=True)


def fanout_geometry(geometry: GeometryParams, copies_per_axis: int) -> FanoutLayout:
    """
    Spot spacing f*tan(theta), array extent and crosstalk margin of a square fanout.

    Args:
        geometry: Optics parameters
        copies_per_axis: Fanout copies along one axis

    Returns:
        FanoutLayout; crosstalk_warning is set when the margin is below 3 spot diameters
    """
    if copies_per_axis < 1:
        raise DomainError(f"copies_per_axis must be positive, got {copies_per_axis}")

    spacing = geometry.focal_length * math.tan(geometry.diffraction_angle_per_order)
    margin = spacing / geometry.spot_diameter
    warning = margin < CROSSTALK_MARGIN_THRESHOLD
    if warning:
        logger.warning(
            f"Fanout spots are {margin:.2f} spot diameters apart (< {CROSSTALK_MARGIN_THRESHOLD:g}); "
            f"expect inter-channel crosstalk"
        )

    return FanoutLayout(
        spot_spacing=spacing,
        array_extent=spacing * (copies_per_axis - 1),
        crosstalk_margin=margin,
        crosstalk_warning=warning,
    )
