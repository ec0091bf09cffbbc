"""
Spatial residual model: covariate-ensemble residuals explained by a polynomial
trend surface in easting and northing, fitted with the same ensemble procedure.
"""

import logging
from dataclasses import replace
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..data_model.types import GeoPoint
from ..design.expand import CoordinateFrame, evaluate_terms, spatial_design
from ..design.prefilter import prefilter_mccm
from ..ensemble.ensemble import Ensemble, model_averaged_predict
from ..ensemble.pipeline import CvSettings, fit_ensemble
from ..ensemble.selection import LASSO_LAR
from ..ensemble.splits import Split, derive_seed, generate_splits
from ..errors import DimensionMismatchError, PreconditionError

logger = logging.getLogger(__name__)


def residuals(ens: Ensemble, design_rows: Union[np.ndarray, pd.DataFrame], y: Sequence[float]) -> np.ndarray:
    """Observed responses minus the model-averaged predictions at the same rows."""
    y = np.asarray(y, dtype=float)
    fitted = model_averaged_predict(ens, design_rows)
    if fitted.shape != y.shape:
        raise DimensionMismatchError(f"{y.size} responses but {fitted.size} predicted rows")
    return y - fitted


def spatial_ensemble(coords: Sequence[GeoPoint], r: Sequence[float], settings: CvSettings, seed: int,
                     splits: Optional[Sequence[Split]] = None, mccm: float = 0.95,
                     single_max: int = 12, inter_total_max: int = 6) -> Ensemble:
    """
    Ensemble of LASSO-LAR trend surfaces fitted to residuals.

    Args:
        coords: observation locations, aligned with ``r``
        r: residuals of the covariate ensemble
        settings: cross-validation settings; the selector is always lasso_lar
        seed: master seed
        splits: reuse the covariate ensemble's splits (required for matched pairing)
        mccm: pre-filtering threshold on the spatial design
        single_max: highest single-axis power
        inter_total_max: highest total order of easting-northing products
    """
    r = np.asarray(r, dtype=float)
    if len(coords) != r.size:
        raise DimensionMismatchError(f"{len(coords)} locations but {r.size} residuals")
    if settings.sse_floor is None:
        raise PreconditionError("Spatial ensembles need an sse floor")

    frame = CoordinateFrame.from_points(coords)
    design = spatial_design(coords, single_max, inter_total_max, frame)
    design, drop_log = prefilter_mccm(design, mccm, derive_seed(seed, "spatial_mccm"))
    logger.info(f"Spatial design: {design.shape[1]} terms after dropping {len(drop_log)} at MCCM {mccm}")

    spatial_settings = replace(settings, selector=LASSO_LAR)
    if splits is None:
        splits = generate_splits(r.size, settings.train_size, settings.n_splits, derive_seed(seed, "splits"))
    return fit_ensemble(design, r, splits, spatial_settings, coordinate_frame=frame)


def spatial_rows(ens: Ensemble, coords: Sequence[GeoPoint]) -> pd.DataFrame:
    """Spatial ensemble terms evaluated at new locations, in the ensemble's coordinate frame."""
    if ens.coordinate_frame is None:
        raise PreconditionError("Ensemble carries no coordinate frame")
    return evaluate_terms(ens.coordinate_frame.normalize(coords), ens.columns)
