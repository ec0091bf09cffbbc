"""
Model averaging over split results: weights inversely proportional to
validation SSE, averaged predictions and ensemble summaries.
"""

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..design.expand import CoordinateFrame
from ..design.terms import TermMeta
from ..errors import DegenerateWeightError, DimensionMismatchError, PreconditionError
from ..lar.path import predict
from .selection import SplitResult

logger = logging.getLogger(__name__)

SUMMARY_KEYS = ("min", "q1", "median", "mean", "q3", "max")


@dataclass(frozen=True, eq=False)
class Ensemble:
    """
    Split results and their model-averaging weights.

    ``columns`` describe the design the member models index into, so new
    rows can be evaluated on the same terms; spatial ensembles also carry the
    coordinate frame their powers were built in.
    """

    results: Tuple[SplitResult, ...]
    weights: np.ndarray
    columns: Tuple[TermMeta, ...] = ()
    selector: str = ""
    coordinate_frame: Optional[CoordinateFrame] = None

    def __post_init__(self):
        if len(self.results) != len(self.weights):
            raise DimensionMismatchError(
                f"{len(self.results)} results but {len(self.weights)} weights"
            )

    @property
    def m(self) -> int:
        return len(self.results)

    @property
    def labels(self) -> List[str]:
        return [c.label for c in self.columns]

    @property
    def splits(self):
        return [r.split for r in self.results]


def ensemble_weights(results: Sequence[Union[SplitResult, float]],
                     sse_floor: Optional[float] = None) -> np.ndarray:
    """
    W_i = (1/sse_i) / sum_k (1/sse_k).

    Args:
        results: split results (or their validation SSEs)
        sse_floor: lower bound applied to every SSE; required when any SSE is 0

    Raises:
        DegenerateWeightError: an SSE is zero and no floor was given
    """
    sse = np.array([r.sse if isinstance(r, SplitResult) else float(r) for r in results], dtype=float)
    if sse.size == 0:
        raise PreconditionError("Cannot weight an empty ensemble")
    if np.any(sse < 0) or not np.all(np.isfinite(sse)):
        raise PreconditionError("Validation SSEs must be finite and non-negative")
    if np.any(sse == 0):
        if sse_floor is None:
            raise DegenerateWeightError(
                f"{int(np.sum(sse == 0))} members have zero validation SSE; set an sse floor (e.g. 1e-12)"
            )
        logger.warning(f"{int(np.sum(sse < sse_floor))} members have validation SSE below the floor {sse_floor}")
    if sse_floor is not None:
        sse = np.maximum(sse, sse_floor)
    inverse = sse.min() / sse
    return inverse / inverse.sum()


def member_predictions(ens: Ensemble, X_raw: Union[np.ndarray, pd.DataFrame]) -> np.ndarray:
    """m x rows matrix of member predictions, each with its own training standardization."""
    return np.vstack([predict(r.model, X_raw) for r in ens.results])


def model_averaged_predict(ens: Ensemble, X_raw: Union[np.ndarray, pd.DataFrame]) -> np.ndarray:
    """Weighted average of the member predictions."""
    return ens.weights @ member_predictions(ens, X_raw)


def _summary(values: np.ndarray) -> Dict[str, float]:
    q1, median, q3 = np.quantile(values, [0.25, 0.5, 0.75])
    return {
        "min": float(values.min()), "q1": float(q1), "median": float(median),
        "mean": float(values.mean()), "q3": float(q3), "max": float(values.max()),
    }


def vsepe_summary(source: Union[Ensemble, Sequence[float]]) -> Dict[str, float]:
    """
    Summary of absolute validation errors pooled over every split.

    Quartiles interpolate linearly between order statistics.
    """
    if isinstance(source, Ensemble):
        if not source.results:
            raise PreconditionError("Ensemble has no results")
        errors = np.concatenate([r.vsepe for r in source.results])
    else:
        errors = np.asarray(source, dtype=float).ravel()
    if errors.size == 0:
        raise PreconditionError("No validation errors to summarize")
    return _summary(np.abs(errors))


def r_squared(observed: Sequence[float], predicted: Sequence[float]) -> float:
    """1 - SSE/SST."""
    observed = np.asarray(observed, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if observed.shape != predicted.shape:
        raise DimensionMismatchError(f"{observed.size} observations but {predicted.size} predictions")
    if observed.size < 2:
        raise PreconditionError("R-squared needs at least two observations")
    centred = observed - observed.mean()
    sst = float(centred @ centred)
    if sst == 0:
        raise PreconditionError("R-squared is undefined for constant observations")
    resid = observed - predicted
    return 1.0 - float(resid @ resid) / sst


def selection_frequency(ens: Ensemble, include_zeros: bool = False,
                        correlated: Optional[Mapping[str, Sequence[str]]] = None) -> pd.DataFrame:
    """
    How many member models contain each term, most frequent first.

    Args:
        ens: ensemble to count over
        include_zeros: list never-selected terms with count 0
        correlated: kept term -> terms removed by pre-filtering in its favour;
            adds a ``correlated_terms`` column when given
    """
    counts = Counter(label for r in ens.results for label in r.model.labels)
    labels = ens.labels or sorted(counts)
    order = {label: i for i, label in enumerate(labels)}
    rows = [(label, counts.get(label, 0)) for label in labels if include_zeros or counts.get(label, 0)]
    rows += [(label, c) for label, c in counts.items() if label not in order]
    rows.sort(key=lambda row: (-row[1], order.get(row[0], len(order))))
    frame = pd.DataFrame(rows, columns=["term", "count"])
    if correlated is not None:
        frame["correlated_terms"] = [";".join(correlated.get(term, ())) for term in frame["term"]]
    return frame


def subset_size_histogram(ens: Ensemble) -> Dict[int, int]:
    """Member count per chosen subset size (intercept-only is size 0)."""
    return dict(sorted(Counter(r.chosen_size for r in ens.results).items()))
