"""
Greedy pre-filtering of design columns to a maximum correlation coefficient
magnitude (MCCM).

The most correlated remaining pair is visited first; within a pair the column
with the larger priority key is dropped:
    1. source rank (finer-resolution surveys are retained)
    2. single terms over interactions
    3. lower polynomial order over higher
    4. a seeded random tiebreak
"""

import logging
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from ..errors import PreconditionError
from .terms import DesignMatrix

logger = logging.getLogger(__name__)

RULES = ("source_rank", "single_over_interaction", "lower_order", "random")
DROP_LOG_COLUMNS = ["dropped_term", "kept_term", "abs_r", "rule"]


def abs_correlations(values: np.ndarray) -> np.ndarray:
    """|Pearson r| between all column pairs."""
    centred = values - values.mean(axis=0)
    norms = np.linalg.norm(centred, axis=0)
    norms[norms == 0] = 1.0
    z = centred / norms
    return np.clip(np.abs(z.T @ z), 0.0, 1.0)


def _deciding_rule(loser: tuple, winner: tuple) -> str:
    for rule, a, b in zip(RULES, loser, winner):
        if a != b:
            return rule
    return RULES[-1]


def prefilter_mccm(design: DesignMatrix, threshold: float, seed: int) -> Tuple[DesignMatrix, pd.DataFrame]:
    """
    Drop columns until no remaining pair has |r| above the threshold.

    Args:
        design: design matrix (correlations are computed on all of its rows)
        threshold: maximum permitted |r|, in (0, 1]
        seed: seed for the random tiebreak

    Returns:
        Tuple of (filtered DesignMatrix, drop log DataFrame)

    Raises:
        PreconditionError: threshold outside (0, 1] or empty design
    """
    if not 0.0 < threshold <= 1.0:
        raise PreconditionError(f"MCCM threshold must be in (0, 1], got {threshold}")
    p = design.shape[1]
    if p < 1:
        raise PreconditionError("MCCM pre-filtering needs at least one column")

    tiebreak = np.random.default_rng(seed).permutation(p)
    keys = [term.priority_key(float(tiebreak[i])) for i, term in enumerate(design.columns)]

    upper = np.triu(abs_correlations(design.values), k=1)
    upper[np.tril_indices(p)] = -1.0
    row_max = upper.max(axis=1)
    row_arg = upper.argmax(axis=1)

    alive = np.ones(p, dtype=bool)
    log: List[dict] = []
    while True:
        i = int(np.argmax(row_max))
        r = float(row_max[i])
        if r <= threshold:
            break
        j = int(row_arg[i])
        drop, keep = (j, i) if keys[j] > keys[i] else (i, j)
        log.append({
            "dropped_term": design.columns[drop].label,
            "kept_term": design.columns[keep].label,
            "abs_r": r,
            "rule": _deciding_rule(keys[drop], keys[keep]),
        })
        alive[drop] = False
        upper[drop, :] = -1.0
        upper[:, drop] = -1.0
        row_max[drop] = -1.0
        stale = np.flatnonzero(alive & (row_arg == drop))
        if stale.size:
            row_max[stale] = upper[stale].max(axis=1)
            row_arg[stale] = upper[stale].argmax(axis=1)

    kept = np.flatnonzero(alive).tolist()
    logger.info(f"MCCM {threshold}: kept {len(kept)} of {p} terms")
    return design.select(kept), pd.DataFrame(log, columns=DROP_LOG_COLUMNS)


def correlated_terms(drop_log: pd.DataFrame) -> Dict[str, List[str]]:
    """Map each kept term to the terms dropped in its favour, in drop order."""
    partners: Dict[str, List[str]] = {}
    for kept, dropped in zip(drop_log["kept_term"], drop_log["dropped_term"]):
        partners.setdefault(kept, []).append(dropped)
    return partners
