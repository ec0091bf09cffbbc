"""
Workflow package.

The stage runner that the command-line front end drives: loads inputs, runs
each pipeline stage with timing and writes outputs plus run metadata.
"""

from .runner import METADATA_FILE, SoilMapPipeline

__version__ = "1.0.0"
__all__ = ['METADATA_FILE', 'SoilMapPipeline']
