"""
One cross-validation split: standardize on the training rows, run a selector,
and keep the candidate model with the smallest validation SSE.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..design.standardize import mirror, standardize
from ..design.terms import DesignMatrix, Standardization, degenerate_columns
from ..errors import PreconditionError
from ..lar.path import LAR, LASSO, FittedModel, LarPath, lar_path, model_at, path_frame
from ..subset_select.selectors import (
    BACKWARD,
    EXHAUSTIVE,
    FORWARD,
    SEQREP,
    SubsetSequence,
    backward_select,
    exhaustive_best,
    forward_select,
    seqrep_select,
    sequence_frame,
)
from .splits import Split

logger = logging.getLogger(__name__)

LASSO_LAR = "lasso_lar"
PLAIN_LAR = "lar"
PATH_SELECTORS = (LASSO_LAR, PLAIN_LAR)
OLS_SELECTORS = (EXHAUSTIVE, FORWARD, BACKWARD, SEQREP)
SELECTOR_NAMES = PATH_SELECTORS + OLS_SELECTORS


@dataclass(frozen=True)
class SelectorConfig:
    corr_tol: float = 0.0
    max_steps: Optional[int] = None
    max_subset_size: Optional[int] = None
    allow_large_exhaustive: bool = False


@dataclass(frozen=True, eq=False)
class SplitResult:
    """
    Outcome of one split. ``model.terms`` index the full design, and
    ``vsepe`` holds the validation errors (observed minus predicted).
    """

    split: Split
    model: FittedModel
    vsepe: np.ndarray
    sse: float
    chosen_step: int
    train_rss: float
    split_id: int = 0
    dropped_constant: Tuple[str, ...] = ()

    @property
    def chosen_size(self) -> int:
        return self.model.size


def _search(selector: str, X: np.ndarray, y: np.ndarray,
            config: SelectorConfig) -> Union[LarPath, SubsetSequence]:
    """The LAR/LASSO path or the per-size OLS winners on standardized training rows."""
    if selector in PATH_SELECTORS:
        variant = LASSO if selector == LASSO_LAR else LAR
        return lar_path(X, y, variant, config.corr_tol, config.max_steps)

    n, p = X.shape
    max_size = config.max_subset_size
    if max_size is None:
        max_size = min(p, n - 2)
    max_size = min(max_size, p, n - 1)
    if selector == EXHAUSTIVE:
        sequence = exhaustive_best(X, y, max_size, config.allow_large_exhaustive)
    elif selector == FORWARD:
        sequence = forward_select(X, y, max_size)
    elif selector == BACKWARD:
        sequence = backward_select(X, y)
    elif selector == SEQREP:
        sequence = seqrep_select(X, y, max_size)
    else:
        raise PreconditionError(f"Unknown selector '{selector}'")
    return sequence


def _candidates(selector: str, X: np.ndarray, y: np.ndarray, config: SelectorConfig, stats,
                labels: Sequence[str]) -> List[FittedModel]:
    search = _search(selector, X, y, config)
    if isinstance(search, LarPath):
        return [model_at(search, k, stats, labels) for k in range(len(search.steps))]

    sequence = search
    models = []
    for size in sequence.sizes:
        fit = sequence.per_size[size]
        models.append(FittedModel(
            fit.terms, fit.coefficients, fit.intercept, stats.take(fit.terms),
            tuple(labels[j] for j in fit.terms),
        ))
    return models


def _to_full_design(model: FittedModel, keep: Sequence[int]) -> FittedModel:
    return FittedModel(
        tuple(int(keep[j]) for j in model.terms), model.coefficients, model.intercept,
        model.standardization, model.labels,
    )


def _fitted(model: FittedModel, X_std: np.ndarray) -> np.ndarray:
    if not model.terms:
        return np.full(X_std.shape[0], model.intercept)
    return model.intercept + X_std[:, list(model.terms)] @ model.coefficients


@dataclass(frozen=True, eq=False)
class _TrainingView:
    """Training rows of one split with constant columns removed, standardized."""

    keep: List[int]
    dropped: Tuple[str, ...]
    train: DesignMatrix
    stats: Standardization
    X_train: np.ndarray

    @classmethod
    def of(cls, design: DesignMatrix, split: Split, split_id: int = 0) -> "_TrainingView":
        train_rows = design.values[list(split.train_idx)]
        constant = set(degenerate_columns(train_rows).tolist())
        keep = [j for j in range(design.shape[1]) if j not in constant]
        dropped = tuple(design.columns[j].label for j in sorted(constant))
        if dropped:
            logger.warning(f"Split {split_id}: dropping {len(dropped)} columns constant in training rows")

        train = DesignMatrix(tuple(design.columns[j] for j in keep), train_rows[:, keep])
        if keep:
            train_std, stats = standardize(train)
            return cls(keep, dropped, train, stats, train_std.values)
        return cls(keep, dropped, train, Standardization.identity(0), train.values)


def run_split(design: DesignMatrix, y: np.ndarray, split: Split, selector: str = LASSO_LAR,
              config: SelectorConfig = SelectorConfig(), split_id: int = 0) -> SplitResult:
    """
    Select the model of one split by validation SSE.

    Args:
        design: unstandardized design over all observations
        y: responses over all observations
        split: training and validation indices
        selector: lasso_lar, lar, exhaustive, forward, backward or seqrep
        config: selector settings
        split_id: position of the split, used in logs and reports

    Returns:
        SplitResult for the candidate with minimal validation SSE; ties go to
        the smaller model, then the earlier candidate
    """
    if selector not in SELECTOR_NAMES:
        raise PreconditionError(f"Unknown selector '{selector}'")
    y = np.asarray(y, dtype=float)
    view = _TrainingView.of(design, split, split_id)
    keep, dropped, train, stats, X_train = view.keep, view.dropped, view.train, view.stats, view.X_train
    X_valid = mirror(design.values[list(split.valid_idx)][:, keep], stats)
    y_train = y[list(split.train_idx)]
    y_valid = y[list(split.valid_idx)]

    labels = [c.label for c in train.columns]
    models = _candidates(selector, X_train, y_train, config, stats, labels)

    best: Optional[Tuple[Tuple[float, int, int], FittedModel, np.ndarray]] = None
    for position, model in enumerate(models):
        errors = y_valid - _fitted(model, X_valid)
        key = (float(errors @ errors), model.size, position)
        if best is None or key < best[0]:
            best = (key, model, errors)

    (sse, _, position), model, errors = best
    resid = y_train - _fitted(model, X_train)
    logger.debug(f"Split {split_id}: chose candidate {position} of size {model.size}, validation SSE {sse:.6g}")
    return SplitResult(
        split=split,
        model=_to_full_design(model, keep),
        vsepe=errors,
        sse=sse,
        chosen_step=position,
        train_rss=float(resid @ resid),
        split_id=split_id,
        dropped_constant=dropped,
    )


def candidate_trace(design: DesignMatrix, y: np.ndarray, split: Split, selector: str = LASSO_LAR,
                    config: SelectorConfig = SelectorConfig()) -> pd.DataFrame:
    """
    Diagnostic table of the candidates one split chooses from.

    Path selectors give one row per knot (step, action, active_size,
    max_abs_corr); OLS selectors give the per-size winners (size, terms, rss).
    """
    if selector not in SELECTOR_NAMES:
        raise PreconditionError(f"Unknown selector '{selector}'")
    view = _TrainingView.of(design, split)
    y_train = np.asarray(y, dtype=float)[list(split.train_idx)]
    search = _search(selector, view.X_train, y_train, config)
    if isinstance(search, LarPath):
        return path_frame(search)
    return sequence_frame(search, [c.label for c in view.train.columns])
