"""
Least Angle Regression with the optional LASSO modification.

The path is stored knot by knot. Step 0 is the empty model; step k is the knot
that ends segment k, carrying the active set used along that segment and the
action (add or drop) that opened it.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg

from ..design.standardize import mirror
from ..design.terms import Standardization
from ..errors import DimensionMismatchError, PreconditionError

logger = logging.getLogger(__name__)

LAR = "lar"
LASSO = "lasso"

_STANDARDIZED_TOL = 1e-8
_RANK_TOL = 1e-10
_CORR_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class PathStep:
    active: Tuple[int, ...]
    coefficients: np.ndarray
    max_abs_corr: float
    action: str
    column: Optional[int] = None

    @property
    def action_label(self) -> str:
        return self.action if self.column is None else f"{self.action}({self.column})"


@dataclass(frozen=True, eq=False)
class LarPath:
    steps: Tuple[PathStep, ...]
    intercept: float
    variant: str
    stop_reason: str

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True, eq=False)
class FittedModel:
    """
    A linear model on a subset of standardized design columns.

    ``terms`` index the design the model was fitted on; ``labels`` name the same
    columns so the model can be applied to a labelled table.
    """

    terms: Tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    standardization: Standardization
    labels: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return len(self.terms)


def _check_standardized(X: np.ndarray, y: np.ndarray):
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"X of shape {X.shape} does not match y of length {y.shape[0]}")
    if X.shape[0] < 2:
        raise PreconditionError("LAR needs at least two observations")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise PreconditionError("LAR inputs must be finite")
    if X.shape[1] == 0:
        return
    means = np.abs(X.mean(axis=0)).max()
    norms = np.abs(np.linalg.norm(X, axis=0) - 1.0).max()
    if means > _STANDARDIZED_TOL or norms > _STANDARDIZED_TOL:
        raise PreconditionError(
            f"LAR needs standardized columns (max |mean| {means:.3g}, max |norm - 1| {norms:.3g})"
        )


def _full_rank(columns: np.ndarray) -> bool:
    r = linalg.qr(columns, mode="r", pivoting=True)[0]
    diag = np.abs(np.diag(r))
    return diag.size == columns.shape[1] and diag[-1] > _RANK_TOL * max(diag[0], 1.0)


def _entry_gamma(c: np.ndarray, a: np.ndarray, C: float, AA: float,
                 candidates: np.ndarray, banned: Optional[int]) -> Tuple[float, Optional[int]]:
    """
    Smallest non-negative step at which an inactive column reaches the active correlation.

    A column dropped at the previous knot sits exactly at the active level, so
    it may only re-enter after a strictly positive step.
    """
    if candidates.size == 0:
        return np.inf, None
    with np.errstate(divide="ignore", invalid="ignore"):
        g1 = (C - c[candidates]) / (AA - a[candidates])
        g2 = (C + c[candidates]) / (AA + a[candidates])
    g1 = np.where(np.isfinite(g1) & (g1 > -1e-12), np.maximum(g1, 0.0), np.inf)
    g2 = np.where(np.isfinite(g2) & (g2 > -1e-12), np.maximum(g2, 0.0), np.inf)
    if banned is not None:
        blocked = (candidates == banned)[:, None] & (np.column_stack([g1, g2]) <= 1e-9 * C / AA)
        g1 = np.where(blocked[:, 0], np.inf, g1)
        g2 = np.where(blocked[:, 1], np.inf, g2)
    gammas = np.minimum(g1, g2)
    k = int(np.argmin(gammas))
    if not np.isfinite(gammas[k]):
        return np.inf, None
    return float(gammas[k]), int(candidates[k])


def lar_path(X: np.ndarray, y: np.ndarray, variant: str = LASSO, corr_tol: float = 0.0,
             max_steps: Optional[int] = None) -> LarPath:
    """
    Compute the LAR (or LAR-LASSO) solution path.

    Args:
        X: n x p matrix with centred, unit-norm columns
        y: response vector (centred internally)
        variant: "lar" or "lasso"
        corr_tol: stop once no correlation with the residual exceeds this
        max_steps: stop after this many knots

    Returns:
        LarPath whose steps run from the empty model to the last knot

    Raises:
        PreconditionError: inputs not standardized or not finite
    """
    if variant not in (LAR, LASSO):
        raise PreconditionError(f"Unknown LAR variant '{variant}'")
    if corr_tol < 0:
        raise PreconditionError(f"corr_tol must be non-negative, got {corr_tol}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    _check_standardized(X, y)

    n, p = X.shape
    intercept = float(y.mean())
    target = y - intercept
    beta = np.zeros(p)
    c = X.T @ target
    C = float(np.max(np.abs(c))) if p else 0.0
    steps: List[PathStep] = [PathStep((), beta.copy(), C, "init")]

    floor = max(corr_tol, _CORR_FLOOR * C)
    max_active = min(p, n - 1)
    if max_active == 0:
        return LarPath(tuple(steps), intercept, variant, "df_exhausted")
    if C <= floor:
        return LarPath(tuple(steps), intercept, variant, "corr_tol")

    max_iter = 10 * (p + n)
    pending: Tuple[str, int] = ("add", int(np.argmax(np.abs(c))))
    active: List[int] = []
    banned: Optional[int] = None
    stop_reason = "max_steps"

    while len(steps) <= max_iter:
        kind, column = pending
        if kind == "add":
            if not _full_rank(X[:, active + [column]]):
                logger.warning(f"Equiangular system singular when adding column {column}; path truncated")
                stop_reason = "singular"
                break
            active.append(column)
        else:
            active.remove(column)

        idx = np.array(active, dtype=int)
        c = X.T @ (target - X @ beta)
        C = float(np.max(np.abs(c[idx])))
        signs = np.sign(c[idx])
        signs[signs == 0] = 1.0

        XA = X[:, idx]
        try:
            w = linalg.cho_solve(linalg.cho_factor(XA.T @ XA), signs)
        except linalg.LinAlgError:
            logger.warning(f"Gram matrix of {len(active)} active columns not positive definite; path truncated")
            stop_reason = "singular"
            break
        AA = 1.0 / np.sqrt(float(signs @ w))
        w = AA * w
        a = X.T @ (XA @ w)

        gamma = C / AA
        following: Optional[Tuple[str, int]] = None
        if len(active) < max_active:
            inactive = np.setdiff1d(np.arange(p), idx)
            g_entry, entering = _entry_gamma(c, a, C, AA, inactive, banned)
            if entering is not None and g_entry < gamma:
                gamma, following = g_entry, ("add", entering)

        if variant == LASSO:
            with np.errstate(divide="ignore", invalid="ignore"):
                g_drop = -beta[idx] / w
            valid = (beta[idx] != 0) & np.isfinite(g_drop) & (g_drop > 0)
            if valid.any():
                k = int(np.flatnonzero(valid)[np.argmin(g_drop[valid])])
                if g_drop[k] < gamma:
                    gamma, following = float(g_drop[k]), ("drop", int(idx[k]))

        beta[idx] += gamma * w
        if following is None:
            C_next = 0.0
        else:
            C_next = max(C - gamma * AA, 0.0)
            if following[0] == "drop":
                beta[following[1]] = 0.0
        steps.append(PathStep(tuple(active), beta.copy(), C_next, kind, column))
        banned = following[1] if following is not None and following[0] == "drop" else None

        if following is None:
            stop_reason = "df_exhausted" if len(active) == max_active else "corr_tol"
            break
        if C_next <= floor:
            stop_reason = "corr_tol"
            break
        if max_steps is not None and len(steps) - 1 >= max_steps:
            stop_reason = "max_steps"
            break
        pending = following
    else:
        logger.warning(f"LAR stopped after {max_iter} iterations without converging")

    logger.debug(f"{variant} path: {len(steps) - 1} knots, stop reason {stop_reason}")
    return LarPath(tuple(steps), intercept, variant, stop_reason)


def model_at(path: LarPath, step: int, standardization: Optional[Standardization] = None,
             labels: Optional[Sequence[str]] = None) -> FittedModel:
    """The fitted model at one knot of the path (step 0 is intercept-only)."""
    if not 0 <= step < len(path.steps):
        raise PreconditionError(f"Step {step} outside path of {len(path.steps)} steps")
    knot = path.steps[step]
    terms = tuple(j for j in knot.active if knot.coefficients[j] != 0.0)
    p = len(knot.coefficients)
    stats = (standardization or Standardization.identity(p)).take(terms)
    names = tuple(labels[j] for j in terms) if labels is not None else tuple(str(j) for j in terms)
    return FittedModel(terms, knot.coefficients[list(terms)].copy(), path.intercept, stats, names)


def predict(model: FittedModel, X_raw: Union[np.ndarray, pd.DataFrame]) -> np.ndarray:
    """
    Intercept plus the mirrored-standardized rows times the coefficients.

    ``X_raw`` is either a labelled table holding every model term or an array
    over the full design the model was fitted on.
    """
    if isinstance(X_raw, pd.DataFrame):
        missing = [label for label in model.labels if label not in X_raw.columns]
        if missing:
            raise DimensionMismatchError(f"Rows lack model terms: {', '.join(missing)}")
        rows = X_raw[list(model.labels)].to_numpy(dtype=float)
    else:
        values = np.asarray(X_raw, dtype=float)
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if model.terms and values.shape[1] <= max(model.terms):
            raise DimensionMismatchError(
                f"Rows have {values.shape[1]} columns but the model uses column {max(model.terms)}"
            )
        rows = values[:, list(model.terms)]
    if not model.terms:
        return np.full(rows.shape[0], model.intercept)
    return model.intercept + mirror(rows, model.standardization) @ model.coefficients


def path_frame(path: LarPath) -> pd.DataFrame:
    """Diagnostic dump: one row per knot."""
    return pd.DataFrame({
        "step": range(len(path.steps)),
        "action": [s.action_label for s in path.steps],
        "active_size": [len(s.active) for s in path.steps],
        "max_abs_corr": [s.max_abs_corr for s in path.steps],
    })
