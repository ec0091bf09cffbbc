"""
Ordinary least squares on column subsets, with an intercept.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import CollinearityError, DimensionMismatchError, PreconditionError

_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OlsFit:
    terms: Tuple[int, ...]
    coefficients: np.ndarray
    intercept: float
    rss: float


def _as_arrays(X, y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"X of shape {X.shape} does not match y of length {y.shape[0]}")
    return X, y


def rank_deficient_columns(columns: np.ndarray) -> Tuple[int, ...]:
    """Positions (within ``columns``) that pivoted QR places beyond the numerical rank."""
    if columns.shape[1] == 0:
        return ()
    r, piv = linalg.qr(columns, mode="r", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = max(diag[0], 1e-300) if diag.size else 1.0
    rank = int(np.sum(diag > _RANK_TOL * scale))
    return tuple(sorted(int(i) for i in piv[rank:]))


def centred_rss(Xc: np.ndarray, yc: np.ndarray, subset: Sequence[int]) -> float:
    """RSS of the intercept model on ``subset`` given centred inputs; inf when the subset is collinear."""
    cols = list(subset)
    if not cols:
        return float(yc @ yc)
    q, r = np.linalg.qr(Xc[:, cols])
    diag = np.abs(np.diag(r))
    if diag.min() <= _RANK_TOL * max(diag.max(), 1e-300):
        return np.inf
    resid = yc - q @ (q.T @ yc)
    return float(resid @ resid)


def ols_fit(X: np.ndarray, y: np.ndarray, subset: Sequence[int]) -> OlsFit:
    """
    Least-squares fit with intercept on the given columns.

    Raises:
        PreconditionError: subset not smaller than the number of observations
        CollinearityError: the selected columns are linearly dependent
    """
    X, y = _as_arrays(X, y)
    terms = tuple(int(j) for j in subset)
    n = X.shape[0]
    if len(terms) >= n:
        raise PreconditionError(f"OLS on {len(terms)} columns needs more than {n} observations")

    y_mean = float(y.mean())
    yc = y - y_mean
    if not terms:
        return OlsFit((), np.zeros(0), y_mean, float(yc @ yc))

    means = X[:, list(terms)].mean(axis=0)
    Xc = X[:, list(terms)] - means
    dependent = rank_deficient_columns(Xc)
    if dependent:
        columns = [terms[i] for i in dependent]
        raise CollinearityError(
            f"Columns {columns} are linearly dependent on the rest of subset {list(terms)}",
            columns=columns,
        )
    coefficients = linalg.lstsq(Xc, yc)[0]
    resid = yc - Xc @ coefficients
    return OlsFit(terms, coefficients, float(y_mean - means @ coefficients), float(resid @ resid))
