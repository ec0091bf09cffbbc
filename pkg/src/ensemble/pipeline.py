"""
Cross-validated ensemble fitting and the training-size / MCCM sweep.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..design.expand import expand_terms
from ..design.prefilter import prefilter_mccm
from ..design.terms import DesignMatrix
from ..errors import ConfigError, SoilMapError
from .ensemble import Ensemble, ensemble_weights, model_averaged_predict, r_squared, vsepe_summary
from .selection import LASSO_LAR, OLS_SELECTORS, SelectorConfig, run_split
from .splits import Split, derive_seed, generate_splits

logger = logging.getLogger(__name__)

BASELINE_MAX_MCCM = 0.4
SWEEP_COLUMNS = ["train_size", "method", "mccm", "min", "q1", "median", "mean", "q3", "max", "r2"]


@dataclass(frozen=True)
class CvSettings:
    selector: str = LASSO_LAR
    train_size: int = 35
    n_splits: int = 500
    corr_tol: float = 0.0
    max_steps: Optional[int] = None
    max_subset_size: Optional[int] = None
    allow_large_exhaustive: bool = False
    allow_collinear_baselines: bool = False
    sse_floor: float = 1e-12
    threads: int = 1

    def selector_config(self) -> SelectorConfig:
        return SelectorConfig(self.corr_tol, self.max_steps, self.max_subset_size, self.allow_large_exhaustive)


@dataclass(frozen=True, eq=False)
class CovariateFit:
    """Everything the covariate stage produces."""

    expanded: DesignMatrix
    design: DesignMatrix
    drop_log: pd.DataFrame
    ensemble: Ensemble
    fitted: np.ndarray
    r2: float
    mccm: float


def check_baseline_mccm(selector: str, mccm: float, allow_collinear: bool):
    """OLS baselines are only run on designs filtered to MCCM <= 0.4 unless overridden."""
    if selector in OLS_SELECTORS and mccm > BASELINE_MAX_MCCM and not allow_collinear:
        raise ConfigError(
            "Baseline selector needs a low-collinearity design",
            [f"mccm: {mccm} is greater than {BASELINE_MAX_MCCM} for selector '{selector}' "
             f"(set allow_collinear_baselines to override)"],
        )


def fit_ensemble(design: DesignMatrix, y: np.ndarray, splits: Sequence[Split], settings: CvSettings,
                 **extra) -> Ensemble:
    """Run every split (concurrently when threads > 1) and weight the chosen models."""
    config = settings.selector_config()
    results = Parallel(n_jobs=settings.threads, prefer="threads")(
        delayed(run_split)(design, y, split, settings.selector, config, split_id)
        for split_id, split in enumerate(splits)
    )
    dropped = sum(1 for r in results if r.dropped_constant)
    if dropped:
        logger.info(f"{dropped} of {len(results)} splits dropped columns constant in their training rows")
    weights = ensemble_weights(results, settings.sse_floor)
    return Ensemble(tuple(results), weights, design.columns, settings.selector, **extra)


def fit_covariate_model(table: pd.DataFrame, y: np.ndarray, settings: CvSettings, seed: int,
                        mccm: float = 0.95, max_order: int = 4, pairwise: bool = True,
                        ranks: Optional[Mapping[str, float]] = None,
                        splits: Optional[Sequence[Split]] = None,
                        expanded: Optional[DesignMatrix] = None) -> CovariateFit:
    """
    Expand, pre-filter and fit the covariate ensemble.

    Args:
        table: realigned covariates, one row per observation
        y: responses
        settings: cross-validation settings
        seed: master seed; splits and MCCM tiebreaks use derived streams
        mccm: pre-filtering threshold
        max_order: highest covariate power
        pairwise: include pairwise interactions
        ranks: covariate priority ranks
        splits: reuse these splits instead of drawing new ones
        expanded: reuse an already expanded design
    """
    check_baseline_mccm(settings.selector, mccm, settings.allow_collinear_baselines)
    y = np.asarray(y, dtype=float)
    if expanded is None:
        expanded = expand_terms(table, max_order, pairwise, ranks)
    design, drop_log = prefilter_mccm(expanded, mccm, derive_seed(seed, "mccm"))
    if splits is None:
        splits = generate_splits(len(y), settings.train_size, settings.n_splits, derive_seed(seed, "splits"))
    logger.info(
        f"Fitting {settings.selector} ensemble: {len(splits)} splits, "
        f"{settings.train_size} training rows, {design.shape[1]} terms"
    )
    ens = fit_ensemble(design, y, splits, settings)
    fitted = model_averaged_predict(ens, design.values)
    r2 = r_squared(y, fitted)
    logger.info(f"Model-averaged R-squared {r2:.4f}")
    return CovariateFit(expanded, design, drop_log, ens, fitted, r2, mccm)


def summary_row(fit: CovariateFit, train_size: int) -> Dict[str, object]:
    row: Dict[str, object] = {"train_size": train_size, "method": fit.ensemble.selector, "mccm": fit.mccm}
    row.update(vsepe_summary(fit.ensemble))
    row["r2"] = fit.r2
    return row


def sweep(table: pd.DataFrame, y: np.ndarray, configs: Sequence[Tuple[int, float]], settings: CvSettings,
          seed: int, max_order: int = 4, pairwise: bool = True,
          ranks: Optional[Mapping[str, float]] = None) -> pd.DataFrame:
    """
    Run the covariate pipeline for every (train_size, mccm) pair.

    Returns:
        One row per configuration, in the given order, with the VSEPE summary
        and the model-averaged R-squared

    Raises:
        SoilMapError: the first failing configuration, its message prefixed
            with the configuration label
    """
    expanded = expand_terms(table, max_order, pairwise, ranks)
    rows: List[Dict[str, object]] = []
    for train_size, mccm in configs:
        label = f"train_size={train_size}, mccm={mccm}"
        logger.info(f"Sweep configuration {label}")
        try:
            fit = fit_covariate_model(
                table, y, replace(settings, train_size=int(train_size)), seed, mccm=float(mccm),
                max_order=max_order, pairwise=pairwise, ranks=ranks, expanded=expanded,
            )
        except SoilMapError as e:
            e.message = f"[{label}] {e.message}"
            e.args = (e.message,)
            raise
        rows.append(summary_row(fit, int(train_size)))
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
