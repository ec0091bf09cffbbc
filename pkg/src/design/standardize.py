"""
Centre and scale design columns to mean zero and unit Euclidean norm, and
mirror training statistics onto new rows.
"""

import numpy as np

from ..errors import DegenerateColumnError, DimensionMismatchError
from .terms import DesignMatrix, Standardization, degenerate_columns


def standardize(design: DesignMatrix) -> tuple:
    """
    Standardize every column by its mean and centred Euclidean norm.

    Args:
        design: unstandardized design matrix

    Returns:
        Tuple of (standardized DesignMatrix, Standardization)

    Raises:
        DegenerateColumnError: a column is constant
    """
    values = design.values
    bad = degenerate_columns(values)
    if bad.size:
        term = design.columns[int(bad[0])].label
        raise DegenerateColumnError(f"Column '{term}' is constant and cannot be standardized", term=term)

    centers = values.mean(axis=0)
    centred = values - centers
    scales = np.linalg.norm(centred, axis=0)
    stats = Standardization(centers, scales)
    return DesignMatrix(design.columns, centred / scales, stats), stats


def mirror(values: np.ndarray, stats: Standardization) -> np.ndarray:
    """Apply training centres and scales to new rows on the same terms."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values.reshape(1, -1)
    if values.shape[1] != len(stats.centers):
        raise DimensionMismatchError(
            f"Matrix has {values.shape[1]} columns but standardization has {len(stats.centers)}"
        )
    return (values - stats.centers) / stats.scales
