"""
Data model package.

Domain types, dataset assembly from a manifest, point/raster file ingestion,
derived vegetation-index covariates and synthetic survey fixtures.
"""

from .loaders import (
    load_dataset,
    load_derived_points,
    load_manifest,
    load_points,
    load_raster,
    write_raster,
)
from .synthetic import RECOVERY_TERMS, FieldFixture, recovery_design, recovery_truth, write_fixture
from .types import (
    Dataset,
    GeoPoint,
    PointCovariate,
    RasterCovariate,
    RasterGrid,
    ResponseObservation,
)
from .vegetation import INDEX_NAMES, vegetation_indices

__version__ = "1.0.0"
__all__ = [
    'Dataset', 'GeoPoint', 'PointCovariate', 'RasterCovariate', 'RasterGrid',
    'ResponseObservation', 'load_dataset', 'load_derived_points', 'load_manifest',
    'load_points', 'load_raster', 'write_raster', 'INDEX_NAMES', 'vegetation_indices',
    'RECOVERY_TERMS', 'FieldFixture', 'recovery_design', 'recovery_truth', 'write_fixture',
]
