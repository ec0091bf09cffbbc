"""
Realign every covariate to square blocks centred on target locations.

Point covariates go through a thin plate spline fitted either globally (small
surveys) or to the k nearest samples of each block centre (large surveys);
raster covariates are sampled nearest-cell on the same lattice.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from scipy.spatial import cKDTree

from ..data_model.types import Dataset, GeoPoint, PointCovariate, RasterCovariate
from ..errors import CoverageError, SingularSystemError
from .blocks import BlockSpec, block_mean_point, block_mean_raster
from .tps import TpsModel, tps_fit

logger = logging.getLogger(__name__)

_CHUNK = 64


@dataclass(frozen=True)
class RealignConfig:
    side: float = 25.0
    grid_n: int = 100
    ridge: float = 0.0
    neighbours: int = 200


class PointRealigner:
    """Block means of one point covariate, with a cached global spline when it is small enough."""

    def __init__(self, covariate: PointCovariate, config: RealignConfig):
        self.covariate = covariate
        self.config = config
        self.global_model: Optional[TpsModel] = None
        self.tree: Optional[cKDTree] = None
        if len(covariate.samples) <= config.neighbours:
            self.global_model = tps_fit(covariate.samples, config.ridge)
        else:
            self.tree = cKDTree(covariate.coordinates())
            logger.warning(
                f"Covariate '{covariate.name}': {len(covariate.samples)} samples, "
                f"fitting local splines on {config.neighbours} neighbours"
            )

    def model_for(self, center: GeoPoint) -> TpsModel:
        if self.global_model is not None:
            return self.global_model
        _, idx = self.tree.query([center.easting, center.northing], k=self.config.neighbours)
        samples = [self.covariate.samples[i] for i in sorted(np.atleast_1d(idx))]
        return tps_fit(samples, self.config.ridge)

    def value_at(self, center: GeoPoint, index: int) -> float:
        block = BlockSpec(center, self.config.side, self.config.grid_n)
        try:
            return block_mean_point(self.model_for(center), block)
        except SingularSystemError as e:
            raise SingularSystemError(
                f"Covariate '{self.covariate.name}' at location {index}: {e.message}"
            )


def _realign_chunk(source, locations: Sequence[GeoPoint], indices: Sequence[int],
                   config: RealignConfig, on_error: str) -> List[float]:
    values = []
    for location, index in zip(locations, indices):
        try:
            if isinstance(source, PointRealigner):
                values.append(source.value_at(location, index))
            else:
                block = BlockSpec(location, config.side, config.grid_n)
                values.append(block_mean_raster(source.grid, block, source.name, index))
        except CoverageError as e:
            if on_error == "raise":
                raise
            logger.warning(f"{e.message}; location set to nodata")
            values.append(np.nan)
    return values


def realign_at(dataset: Dataset, locations: Sequence[GeoPoint], config: RealignConfig = RealignConfig(),
               threads: int = 1, on_error: str = "raise") -> pd.DataFrame:
    """
    Realign every covariate of a dataset to blocks centred on the given locations.

    Args:
        dataset: source of point and raster covariates
        locations: block centres
        config: block geometry and spline settings
        threads: worker count; results do not depend on it
        on_error: "raise" to propagate coverage errors, "nan" to record NaN

    Returns:
        DataFrame with one row per location and one column per covariate in manifest order
    """
    sources = []
    for name in dataset.covariate_order:
        covariate = dataset.covariate(name)
        if isinstance(covariate, PointCovariate):
            sources.append(PointRealigner(covariate, config))
        else:
            sources.append(covariate)

    tasks: List[Tuple[int, int]] = []
    for c in range(len(sources)):
        for start in range(0, len(locations), _CHUNK):
            tasks.append((c, start))

    results = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_realign_chunk)(
            sources[c],
            locations[start:start + _CHUNK],
            range(start, min(start + _CHUNK, len(locations))),
            config,
            on_error,
        )
        for c, start in tasks
    )

    table = np.empty((len(locations), len(sources)))
    for (c, start), values in zip(tasks, results):
        table[start:start + len(values), c] = values
    return pd.DataFrame(table, columns=list(dataset.covariate_order))


def realign_dataset(dataset: Dataset, side: float = 25.0, grid_n: int = 100, ridge: float = 0.0,
                    neighbours: int = 200, threads: int = 1) -> pd.DataFrame:
    """Realigned covariate table, one row per response observation."""
    config = RealignConfig(side=side, grid_n=grid_n, ridge=ridge, neighbours=neighbours)
    logger.info(
        f"Realigning {len(dataset.covariate_order)} covariates to {dataset.n} blocks "
        f"(side {side} m, {grid_n} x {grid_n} lattice)"
    )
    return realign_at(dataset, dataset.locations(), config, threads=threads)


def realigned_frame(dataset: Dataset, table: pd.DataFrame) -> pd.DataFrame:
    """The realigned table with easting, northing and response columns in front."""
    front = pd.DataFrame({
        "easting": [p.easting for p in dataset.locations()],
        "northing": [p.northing for p in dataset.locations()],
        "response": dataset.response_values(),
    })
    return pd.concat([front, table.reset_index(drop=True)], axis=1)


def split_realigned_frame(frame: pd.DataFrame) -> Tuple[pd.DataFrame, np.ndarray, List[GeoPoint]]:
    """Inverse of ``realigned_frame``: covariate table, responses and locations."""
    locations = [GeoPoint(float(e), float(n)) for e, n in zip(frame["easting"], frame["northing"])]
    table = frame.drop(columns=["easting", "northing", "response"]).reset_index(drop=True)
    return table, frame["response"].to_numpy(dtype=float), locations
