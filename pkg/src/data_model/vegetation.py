"""
Vegetation indices computed from near-infrared and red reflectance.
"""

import logging
import math
from typing import Dict

from ..errors import DataError, DomainError

logger = logging.getLogger(__name__)

INDEX_NAMES = ("SR", "DVI", "NDVI", "SAVI", "NLI", "MNLI", "MSR", "TVI", "RDVI")


def vegetation_indices(nir: float, red: float, soil_factor: float = 0.5,
                       strict: bool = True) -> Dict[str, float]:
    """
    Compute the nine reflectance-based vegetation indices.

    Args:
        nir: near-infrared reflectance (finite, non-negative)
        red: red reflectance (finite, non-negative)
        soil_factor: the SAVI/MNLI soil adjustment L
        strict: raise DomainError naming the undefined indices; when False
            they map to NaN instead (used by ingestion, which drops them)

    Returns:
        Mapping of index name to value
    """
    if not (math.isfinite(nir) and math.isfinite(red)) or nir < 0 or red < 0:
        raise DataError(f"Reflectance must be finite and non-negative, got nir={nir}, red={red}")

    nan = math.nan
    total = nir + red
    nir_sq = nir * nir
    L = soil_factor

    sr = nir / red if red != 0 else nan
    ndvi = (nir - red) / total if total != 0 else nan

    indices = {
        "SR": sr,
        "DVI": nir - red,
        "NDVI": ndvi,
        "SAVI": (nir - red) * (1 + L) / (total + L) if total + L != 0 else nan,
        "NLI": (nir_sq - red) / (nir_sq + red) if nir_sq + red != 0 else nan,
        "MNLI": (nir_sq - red) * (1 + L) / (nir_sq + red + L) if nir_sq + red + L != 0 else nan,
        "MSR": (sr - 1) / (math.sqrt(sr) + 1) if red != 0 else nan,
        "TVI": math.sqrt(ndvi + 0.5) if total != 0 and ndvi >= -0.5 else nan,
        "RDVI": (nir - red) / math.sqrt(total) if total != 0 else nan,
    }

    undefined = [k for k in INDEX_NAMES if math.isnan(indices[k])]
    if undefined:
        if strict:
            raise DomainError(
                f"Indices undefined for nir={nir}, red={red}: {', '.join(undefined)}", keys=undefined
            )
        logger.debug(f"Undefined vegetation indices for nir={nir}, red={red}: {undefined}")
    return indices
