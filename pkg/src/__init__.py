"""
Source package for the Soil Mapping Pipeline.

This package contains modules for covariate realignment, design expansion,
LASSO model-averaging ensembles and full-cover prediction rasters.
"""

__version__ = "1.0.0"
__author__ = "Soil Mapping Team"
