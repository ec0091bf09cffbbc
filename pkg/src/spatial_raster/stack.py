"""
Full-cover prediction: per-pixel member predictions from the covariate and
spatial ensembles, combined into a prediction raster and an uncertainty raster.
"""

import logging
import os
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..data_model.loaders import write_raster
from ..data_model.types import GeoPoint, RasterGrid
from ..design.expand import evaluate_terms
from ..ensemble.ensemble import Ensemble, member_predictions
from ..errors import DimensionMismatchError, PreconditionError
from .residuals import spatial_rows

logger = logging.getLogger(__name__)

MATCHED = "matched"
CROSS = "cross"
PAIRINGS = (MATCHED, CROSS)
DEFAULT_NODATA = -9999.0


@dataclass(frozen=True, eq=False)
class PredictionStack:
    """Member predictions, shape (m, pixels) in row-major pixel order, with their weights."""

    geometry: RasterGrid
    members: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        members = np.atleast_2d(np.asarray(self.members, dtype=float))
        if members.shape[1] != self.geometry.ncols * self.geometry.nrows:
            raise DimensionMismatchError(
                f"Stack covers {members.shape[1]} pixels but the grid has "
                f"{self.geometry.ncols * self.geometry.nrows}"
            )
        if members.shape[0] != len(self.weights):
            raise DimensionMismatchError(f"{members.shape[0]} members but {len(self.weights)} weights")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    @property
    def m(self) -> int:
        return self.members.shape[0]


@dataclass(frozen=True, eq=False)
class OutputRasters:
    prediction: RasterGrid
    uncertainty: RasterGrid


def _same_splits(a: Ensemble, b: Ensemble) -> bool:
    return all(x.train_idx == y.train_idx for x, y in zip(a.splits, b.splits))


def predict_full_cover(cov_ens: Ensemble, spat_ens: Ensemble, pixel_rows: pd.DataFrame,
                       pixel_coords: Sequence[GeoPoint], geometry: RasterGrid,
                       pairing: str = MATCHED, valid: Optional[np.ndarray] = None) -> PredictionStack:
    """
    Combine covariate and spatial member predictions at every pixel.

    Args:
        cov_ens: covariate ensemble
        spat_ens: spatial residual ensemble
        pixel_rows: realigned covariate table, one row per pixel
        pixel_coords: pixel centres, aligned with ``pixel_rows``
        geometry: output grid
        pairing: "matched" sums member k of each ensemble (same splits) with
            weights proportional to the product of the two; "cross" sums every
            pair of members with product weights
        valid: pixels to predict; others are NaN in the stack

    Raises:
        PreconditionError: unknown pairing, or matched pairing over different splits
        DimensionMismatchError: member counts differ under matched pairing
    """
    if pairing not in PAIRINGS:
        raise PreconditionError(f"Unknown pairing '{pairing}' (expected one of {', '.join(PAIRINGS)})")
    if len(pixel_rows) != len(pixel_coords):
        raise DimensionMismatchError(f"{len(pixel_rows)} pixel rows but {len(pixel_coords)} pixel centres")

    cov_terms = evaluate_terms(pixel_rows.reset_index(drop=True), cov_ens.columns)
    cov_members = member_predictions(cov_ens, cov_terms)
    spat_members = member_predictions(spat_ens, spatial_rows(spat_ens, pixel_coords))

    if pairing == MATCHED:
        if cov_ens.m != spat_ens.m:
            raise DimensionMismatchError(
                f"Matched pairing needs equal member counts, got {cov_ens.m} and {spat_ens.m}"
            )
        if not _same_splits(cov_ens, spat_ens):
            raise PreconditionError("Matched pairing needs both ensembles fitted on the same splits")
        members = cov_members + spat_members
        weights = cov_ens.weights * spat_ens.weights
    else:
        members = (cov_members[:, None, :] + spat_members[None, :, :]).reshape(-1, cov_members.shape[1])
        weights = np.outer(cov_ens.weights, spat_ens.weights).ravel()
    weights = weights / weights.sum()

    if valid is not None:
        members = np.where(np.asarray(valid, dtype=bool)[None, :], members, np.nan)
    logger.info(f"Prediction stack: {members.shape[0]} members over {members.shape[1]} pixels ({pairing} pairing)")
    return PredictionStack(geometry, members, weights)


def summarize_stack(stack: PredictionStack, central: float = 0.95,
                    nodata: Optional[float] = None) -> OutputRasters:
    """
    Weighted-mean prediction and the width of the central interval of the
    unweighted member predictions at every pixel.

    Pixels with any missing member prediction are written as nodata.
    """
    if stack.m < 2:
        raise PreconditionError(f"Uncertainty needs at least 2 members, got {stack.m}")
    if not 0.0 < central < 1.0:
        raise PreconditionError(f"central must be in (0, 1), got {central}")
    if nodata is None:
        nodata = stack.geometry.nodata if stack.geometry.nodata is not None else DEFAULT_NODATA

    missing = ~np.isfinite(stack.members).all(axis=0)
    members = np.where(missing[None, :], 0.0, stack.members)
    prediction = stack.weights @ members
    upper, lower = np.quantile(members, [(1.0 + central) / 2.0, (1.0 - central) / 2.0], axis=0)
    width = np.maximum(upper - lower, 0.0)

    prediction[missing] = nodata
    width[missing] = nodata
    shape = (stack.geometry.nrows, stack.geometry.ncols)
    return OutputRasters(
        prediction=stack.geometry.with_values(prediction.reshape(shape), nodata),
        uncertainty=stack.geometry.with_values(width.reshape(shape), nodata),
    )


def write_outputs(outputs: OutputRasters, output_dir: str) -> Dict[str, str]:
    """Write prediction.asc and uncertainty.asc."""
    os.makedirs(output_dir, exist_ok=True)
    paths = {
        "prediction": os.path.join(output_dir, "prediction.asc"),
        "uncertainty": os.path.join(output_dir, "uncertainty.asc"),
    }
    write_raster(outputs.prediction, paths["prediction"])
    write_raster(outputs.uncertainty, paths["uncertainty"])
    return paths


def member_stack_frame(stack: PredictionStack) -> pd.DataFrame:
    """Long-format dump of the stack: pixel_id, member_id, value."""
    m, pixels = stack.members.shape
    return pd.DataFrame({
        "pixel_id": np.tile(np.arange(pixels), m),
        "member_id": np.repeat(np.arange(m), pixels),
        "value": stack.members.ravel(),
    })
