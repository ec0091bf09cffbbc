"""
Realignment package.

Moves misaligned point and raster covariates onto square blocks centred on
response locations (or prediction pixels) via thin plate splines and
lattice block means.
"""

from .blocks import BlockSpec, block_lattice, block_mean_point, block_mean_raster
from .realign import (
    RealignConfig,
    realign_at,
    realign_dataset,
    realigned_frame,
    split_realigned_frame,
)
from .tps import TpsModel, tps_eval, tps_eval_many, tps_fit

__version__ = "1.0.0"
__all__ = [
    'BlockSpec', 'block_lattice', 'block_mean_point', 'block_mean_raster',
    'RealignConfig', 'realign_at', 'realign_dataset', 'realigned_frame',
    'split_realigned_frame', 'TpsModel', 'tps_eval', 'tps_eval_many', 'tps_fit',
]
