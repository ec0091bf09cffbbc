"""
LAR package.

Least Angle Regression and its LASSO modification on standardized designs,
plus helpers to turn a knot into a fitted model and predict with it.
"""

from .path import LAR, LASSO, FittedModel, LarPath, PathStep, lar_path, model_at, path_frame, predict

__version__ = "1.0.0"
__all__ = [
    'LAR', 'LASSO', 'FittedModel', 'LarPath', 'PathStep', 'lar_path', 'model_at',
    'path_frame', 'predict',
]
