"""
Domain types for geostatistical responses and covariate sources.

All types are immutable after construction. Arrays held by ``RasterGrid`` are
marked read-only so instances can be shared between worker threads.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeoPoint:
    """A location on the planar coordinate system, in metres."""

    easting: float
    northing: float

    def __post_init__(self):
        if not (math.isfinite(self.easting) and math.isfinite(self.northing)):
            raise DataError(f"Non-finite coordinates: ({self.easting}, {self.northing})")


Sample = Tuple[GeoPoint, float]


@dataclass(frozen=True)
class ResponseObservation:
    location: GeoPoint
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DataError(f"Non-finite response value at {self.location}")


@dataclass(frozen=True)
class PointCovariate:
    """
    A covariate observed at scattered locations (e.g. an ATV survey).

    Use ``from_samples`` to build one from raw records; it merges exact
    duplicates and rejects duplicate locations carrying conflicting values.
    """

    name: str
    samples: Tuple[Sample, ...]
    priority_rank: float = 0.0

    @classmethod
    def from_samples(cls, name: str, samples: Sequence[Sample],
                     priority_rank: float = 0.0) -> "PointCovariate":
        seen: Dict[GeoPoint, float] = {}
        unique: List[Sample] = []
        for location, value in samples:
            if location in seen:
                if seen[location] != value:
                    raise DataError(
                        f"Covariate '{name}' has conflicting values at "
                        f"({location.easting}, {location.northing})"
                    )
                continue
            seen[location] = value
            unique.append((location, float(value)))
        if len(unique) < len(samples):
            logger.debug(f"Covariate '{name}': merged {len(samples) - len(unique)} duplicate samples")
        return cls(name=name, samples=tuple(unique), priority_rank=priority_rank)

    def coordinates(self) -> np.ndarray:
        """Sample locations as an (m, 2) array of easting, northing."""
        return np.array([[p.easting, p.northing] for p, _ in self.samples], dtype=float).reshape(-1, 2)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.samples], dtype=float)


@dataclass(frozen=True, eq=False)
class RasterGrid:
    """
    A regular grid in ESRI ASCII grid convention.

    ``values`` has shape (nrows, ncols); row 0 is the northernmost row.
    """

    xllcorner: float
    yllcorner: float
    cellsize: float
    ncols: int
    nrows: int
    values: np.ndarray
    nodata: Optional[float] = None

    def __post_init__(self):
        if not self.cellsize > 0:
            raise DataError(f"Raster cellsize must be positive, got {self.cellsize}")
        values = np.asarray(self.values, dtype=float)
        if values.size != self.ncols * self.nrows:
            raise DataError(
                f"Raster has {values.size} values but header declares "
                f"{self.ncols} x {self.nrows}"
            )
        values = values.reshape(self.nrows, self.ncols).copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def nodata_mask(self) -> np.ndarray:
        """True where a cell holds the nodata sentinel (or NaN)."""
        mask = np.isnan(self.values)
        if self.nodata is not None:
            mask |= self.values == self.nodata
        return mask

    def with_values(self, values: np.ndarray, nodata: Optional[float] = None) -> "RasterGrid":
        """A grid with this geometry and new values."""
        return RasterGrid(
            xllcorner=self.xllcorner,
            yllcorner=self.yllcorner,
            cellsize=self.cellsize,
            ncols=self.ncols,
            nrows=self.nrows,
            values=np.asarray(values, dtype=float),
            nodata=self.nodata if nodata is None else nodata,
        )

    def cell_centers(self) -> np.ndarray:
        """Pixel centres as an (nrows * ncols, 2) array in row-major order, north row first."""
        cols = self.xllcorner + (np.arange(self.ncols) + 0.5) * self.cellsize
        rows = self.yllcorner + (self.nrows - np.arange(self.nrows) - 0.5) * self.cellsize
        east, north = np.meshgrid(cols, rows)
        return np.column_stack([east.ravel(), north.ravel()])


@dataclass(frozen=True)
class RasterCovariate:
    name: str
    grid: RasterGrid
    priority_rank: float = 0.0


@dataclass(frozen=True)
class Dataset:
    """Response observations plus the covariate sources used to explain them."""

    responses: Tuple[ResponseObservation, ...]
    point_covariates: Tuple[PointCovariate, ...] = ()
    raster_covariates: Tuple[RasterCovariate, ...] = ()
    # manifest order of all covariate names, points and rasters interleaved
    covariate_order: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.responses) < 2:
            raise DataError(f"At least 2 response observations are required, got {len(self.responses)}")
        names = [c.name for c in self.point_covariates] + [c.name for c in self.raster_covariates]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise DataError(f"Duplicate covariate names: {', '.join(duplicates)}")
        if not self.covariate_order:
            object.__setattr__(self, "covariate_order", tuple(names))
        elif sorted(self.covariate_order) != sorted(names):
            raise DataError("covariate_order must list every covariate exactly once")

    @property
    def n(self) -> int:
        return len(self.responses)

    def locations(self) -> List[GeoPoint]:
        return [r.location for r in self.responses]

    def response_values(self) -> np.ndarray:
        return np.array([r.value for r in self.responses], dtype=float)

    def priority_ranks(self) -> Dict[str, float]:
        ranks = {c.name: c.priority_rank for c in self.point_covariates}
        ranks.update({c.name: c.priority_rank for c in self.raster_covariates})
        return ranks

    def covariate(self, name: str):
        for cov in self.point_covariates + self.raster_covariates:
            if cov.name == name:
                return cov
        raise KeyError(name)
