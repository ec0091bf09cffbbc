"""
Spatial raster package.

Residual trend-surface ensembles, per-pixel covariate rows and full-cover
prediction/uncertainty rasters.
"""

from .pixels import PixelRows, build_pixel_rows, pixel_centers
from .residuals import residuals, spatial_ensemble, spatial_rows
from .stack import (
    CROSS,
    MATCHED,
    PAIRINGS,
    OutputRasters,
    PredictionStack,
    member_stack_frame,
    predict_full_cover,
    summarize_stack,
    write_outputs,
)

__version__ = "1.0.0"
__all__ = [
    'PixelRows', 'build_pixel_rows', 'pixel_centers', 'residuals', 'spatial_ensemble',
    'spatial_rows', 'CROSS', 'MATCHED', 'PAIRINGS', 'OutputRasters', 'PredictionStack',
    'member_stack_frame', 'predict_full_cover', 'summarize_stack', 'write_outputs',
]
