"""
Block averaging over square lattices centred on target locations.

A block of side s is divided into grid_n x grid_n equal sub-cells and sampled
at the sub-cell centres, so block edges are never on the lattice.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..data_model.types import GeoPoint, RasterGrid
from ..errors import CoverageError, DataError
from .tps import TpsModel, tps_eval_many

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockSpec:
    center: GeoPoint
    side: float = 25.0
    grid_n: int = 100

    def __post_init__(self):
        if not self.side > 0:
            raise DataError(f"Block side must be positive, got {self.side}")
        if self.grid_n < 1:
            raise DataError(f"Block grid_n must be at least 1, got {self.grid_n}")


def block_lattice(block: BlockSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Eastings and northings of the grid_n x grid_n lattice points, flattened."""
    offsets = block.side * ((np.arange(block.grid_n) + 0.5) / block.grid_n - 0.5)
    east, north = np.meshgrid(block.center.easting + offsets, block.center.northing + offsets)
    return east.ravel(), north.ravel()


def block_mean_point(model: TpsModel, block: BlockSpec) -> float:
    """Mean of the spline over the block lattice."""
    east, north = block_lattice(block)
    return float(np.mean(tps_eval_many(model, east, north)))


def raster_lookup(grid: RasterGrid, east: np.ndarray, north: np.ndarray) -> np.ndarray:
    """Nearest-cell raster values at the given points; NaN outside the extent or on nodata."""
    top = grid.yllcorner + grid.nrows * grid.cellsize
    cols = np.floor((np.asarray(east) - grid.xllcorner) / grid.cellsize).astype(int)
    rows = np.floor((top - np.asarray(north)) / grid.cellsize).astype(int)
    inside = (cols >= 0) & (cols < grid.ncols) & (rows >= 0) & (rows < grid.nrows)

    out = np.full(cols.shape, np.nan)
    mask = grid.nodata_mask
    r, c = rows[inside], cols[inside]
    out[inside] = np.where(mask[r, c], np.nan, grid.values[r, c])
    return out


def block_mean_raster(grid: RasterGrid, block: BlockSpec,
                      covariate: Optional[str] = None, index: Optional[int] = None) -> float:
    """
    Mean of nearest-cell raster values at the block lattice, skipping nodata.

    Raises:
        CoverageError: every lattice point is outside the raster or on nodata
    """
    east, north = block_lattice(block)
    values = raster_lookup(grid, east, north)
    usable = ~np.isnan(values)
    if not usable.any():
        raise CoverageError(
            f"Covariate '{covariate}' has no data in the block at location {index} "
            f"({block.center.easting}, {block.center.northing})",
            covariate=covariate, index=index,
        )
    return float(values[usable].mean())
