"""
Realigned covariate rows for every pixel of an output grid.
"""

import logging
from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from ..data_model.types import Dataset, GeoPoint, RasterGrid
from ..realign.realign import RealignConfig, realign_at

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PixelRows:
    """
    One realigned row per pixel in row-major order (north row first).

    ``valid`` is False for pixels where some covariate had no data; those
    pixels become nodata in the output rasters.
    """

    table: pd.DataFrame
    coords: List[GeoPoint]
    valid: np.ndarray


def pixel_centers(geometry: RasterGrid) -> List[GeoPoint]:
    return [GeoPoint(float(e), float(n)) for e, n in geometry.cell_centers()]


def build_pixel_rows(dataset: Dataset, geometry: RasterGrid, config: RealignConfig = RealignConfig(),
                     threads: int = 1) -> PixelRows:
    """
    Realign every covariate to blocks centred on the pixel centres of ``geometry``.

    Blocks with no covariate coverage are logged and marked invalid rather
    than aborting the run.
    """
    coords = pixel_centers(geometry)
    logger.info(f"Realigning covariates to {len(coords)} pixels ({geometry.nrows} x {geometry.ncols})")
    table = realign_at(dataset, coords, config, threads=threads, on_error="nan")
    valid = np.isfinite(table.to_numpy(dtype=float)).all(axis=1)
    if not valid.all():
        logger.warning(f"{int((~valid).sum())} pixels lack covariate coverage and will be written as nodata")
    return PixelRows(table, coords, valid)
