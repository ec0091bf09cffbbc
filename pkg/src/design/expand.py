"""
Design matrix construction: covariate polynomial/interaction expansion and the
spatial trend-surface design in easting and northing.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ..data_model.types import GeoPoint
from ..errors import DataError
from .terms import (
    EASTING_AXIS,
    INTERACTION,
    LINEAR,
    NORTHING_AXIS,
    POWER,
    SPATIAL_INTERACTION,
    SPATIAL_POWER,
    DesignMatrix,
    TermMeta,
    degenerate_columns,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoordinateFrame:
    """Centre and scale applied to coordinates before powering."""

    east_center: float
    east_scale: float
    north_center: float
    north_scale: float

    @classmethod
    def from_points(cls, coords: Sequence[GeoPoint]) -> "CoordinateFrame":
        east = np.array([p.easting for p in coords], dtype=float)
        north = np.array([p.northing for p in coords], dtype=float)
        if len(np.unique(east)) < 2 or len(np.unique(north)) < 2:
            raise DataError("Spatial design needs at least 2 distinct eastings and 2 distinct northings")
        return cls(float(east.mean()), float(east.std()), float(north.mean()), float(north.std()))

    def normalize(self, coords: Sequence[GeoPoint]) -> pd.DataFrame:
        east = np.array([p.easting for p in coords], dtype=float)
        north = np.array([p.northing for p in coords], dtype=float)
        return pd.DataFrame({
            EASTING_AXIS: (east - self.east_center) / self.east_scale,
            NORTHING_AXIS: (north - self.north_center) / self.north_scale,
        })


def covariate_terms(names: Sequence[str], max_order: int = 4, pairwise: bool = True,
                    ranks: Optional[Mapping[str, float]] = None) -> List[TermMeta]:
    """Powers 1..max_order of each covariate in order, then all unordered pairs of linear terms."""
    ranks = ranks or {}
    terms: List[TermMeta] = []
    for name in names:
        rank = float(ranks.get(name, 0.0))
        for order in range(1, max_order + 1):
            terms.append(TermMeta(LINEAR if order == 1 else POWER, name, order, source_rank=rank))
    if pairwise:
        for a, b in combinations(names, 2):
            rank = max(float(ranks.get(a, 0.0)), float(ranks.get(b, 0.0)))
            terms.append(TermMeta(INTERACTION, a, 1, b, 1, source_rank=rank))
    return terms


def spatial_terms(single_max: int = 12, inter_total_max: int = 6) -> List[TermMeta]:
    """E^a and N^b up to single_max, then E^a:N^b with a, b >= 1 and a + b <= inter_total_max."""
    terms = [TermMeta(SPATIAL_POWER, EASTING_AXIS, a) for a in range(1, single_max + 1)]
    terms += [TermMeta(SPATIAL_POWER, NORTHING_AXIS, b) for b in range(1, single_max + 1)]
    for total in range(2, inter_total_max + 1):
        for a in range(total - 1, 0, -1):
            terms.append(TermMeta(SPATIAL_INTERACTION, EASTING_AXIS, a, NORTHING_AXIS, total - a))
    return terms


def evaluate_terms(table: pd.DataFrame, terms: Sequence[TermMeta]) -> pd.DataFrame:
    """Evaluate terms on new rows without any degeneracy checks (used for prediction)."""
    if not terms:
        return pd.DataFrame(index=range(len(table)))
    return pd.DataFrame(
        np.column_stack([t.evaluate(table) for t in terms]),
        columns=[t.label for t in terms],
    )


def _build(table: pd.DataFrame, terms: Sequence[TermMeta], what: str) -> DesignMatrix:
    values = evaluate_terms(table, terms).to_numpy(dtype=float)
    constant = degenerate_columns(values) if len(table) else np.array([], dtype=int)
    if constant.size:
        logger.warning(
            f"{what}: dropping {constant.size} constant columns: "
            f"{', '.join(terms[i].label for i in constant[:10])}"
            f"{' ...' if constant.size > 10 else ''}"
        )
        keep = [i for i in range(len(terms)) if i not in set(constant.tolist())]
        return DesignMatrix(tuple(terms[i] for i in keep), values[:, keep])
    return DesignMatrix(tuple(terms), values)


def expand_terms(realigned: pd.DataFrame, max_order: int = 4, pairwise: bool = True,
                 ranks: Optional[Mapping[str, float]] = None) -> DesignMatrix:
    """
    Expand a realigned covariate table into polynomial and pairwise interaction terms.

    Args:
        realigned: n x p table, one column per covariate in manifest order
        max_order: highest power of each covariate
        pairwise: include products of all distinct pairs of linear terms
        ranks: covariate name -> priority rank used by pre-filtering

    Returns:
        Unstandardized DesignMatrix with p*max_order + C(p, 2) columns
        (fewer only if some column is constant)
    """
    if realigned.shape[1] < 1:
        raise DataError("Expansion needs at least one covariate")
    if realigned.shape[0] < 2:
        raise DataError("Expansion needs at least two observations")
    flat = degenerate_columns(realigned.to_numpy(dtype=float))
    if flat.size:
        names = [str(realigned.columns[i]) for i in flat]
        logger.warning(f"Dropping {flat.size} constant covariates before expansion: {', '.join(names)}")
        realigned = realigned.drop(columns=names)
        if realigned.shape[1] < 1:
            raise DataError("Every covariate is constant over the observations")
    terms = covariate_terms(list(realigned.columns), max_order, pairwise, ranks)
    design = _build(realigned, terms, "Covariate design")
    logger.info(f"Expanded {realigned.shape[1]} covariates to {design.shape[1]} terms")
    return design


def spatial_design(coords: Sequence[GeoPoint], single_max: int = 12, inter_total_max: int = 6,
                   frame: Optional[CoordinateFrame] = None) -> DesignMatrix:
    """
    Polynomial trend-surface design in easting and northing.

    Coordinates are centred and scaled (by ``frame``, estimated from ``coords``
    when absent) before powering.
    """
    frame = frame or CoordinateFrame.from_points(coords)
    terms = spatial_terms(single_max, inter_total_max)
    return _build(frame.normalize(coords), terms, "Spatial design")
