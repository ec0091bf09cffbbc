"""
Design package.

Builds covariate and spatial design matrices, standardizes them for the path
algorithms and pre-filters correlated terms.
"""

from .expand import (
    CoordinateFrame,
    covariate_terms,
    evaluate_terms,
    expand_terms,
    spatial_design,
    spatial_terms,
)
from .prefilter import DROP_LOG_COLUMNS, abs_correlations, correlated_terms, prefilter_mccm
from .standardize import mirror, standardize
from .terms import (
    INTERACTION,
    LINEAR,
    POWER,
    SPATIAL_INTERACTION,
    SPATIAL_POWER,
    DesignMatrix,
    Standardization,
    TermMeta,
    degenerate_columns,
)

__version__ = "1.0.0"
__all__ = [
    'CoordinateFrame', 'covariate_terms', 'evaluate_terms', 'expand_terms',
    'spatial_design', 'spatial_terms', 'DROP_LOG_COLUMNS', 'abs_correlations',
    'correlated_terms', 'prefilter_mccm', 'mirror', 'standardize',
    'INTERACTION', 'LINEAR', 'POWER', 'SPATIAL_INTERACTION', 'SPATIAL_POWER',
    'DesignMatrix', 'Standardization', 'TermMeta', 'degenerate_columns',
]
