"""
Subset selection package.

OLS on column subsets and the baseline selectors: exhaustive branch-and-bound,
forward, backward and sequential replacement.
"""

from .ols import OlsFit, ols_fit, rank_deficient_columns
from .selectors import (
    BACKWARD,
    EXHAUSTIVE,
    EXHAUSTIVE_MAX_TERMS,
    FORWARD,
    METHODS,
    SEQREP,
    SubsetSequence,
    backward_select,
    exhaustive_best,
    forward_select,
    seqrep_select,
    sequence_frame,
)

__version__ = "1.0.0"
__all__ = [
    'OlsFit', 'ols_fit', 'rank_deficient_columns', 'BACKWARD', 'EXHAUSTIVE',
    'EXHAUSTIVE_MAX_TERMS', 'FORWARD', 'METHODS', 'SEQREP',
    'SubsetSequence', 'backward_select', 'exhaustive_best', 'forward_select',
    'seqrep_select', 'sequence_frame',
]
