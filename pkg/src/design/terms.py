"""
Term metadata and the design matrix container.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

LINEAR = "linear"
POWER = "power"
INTERACTION = "interaction"
SPATIAL_POWER = "spatial_power"
SPATIAL_INTERACTION = "spatial_interaction"

EASTING_AXIS = "E"
NORTHING_AXIS = "N"

_SINGLE_KINDS = (LINEAR, POWER, SPATIAL_POWER)


def _factor_label(base: str, order: int) -> str:
    return base if order == 1 else f"{base}^{order}"


@dataclass(frozen=True)
class TermMeta:
    """
    Description of one design column.

    ``source_rank`` is the manifest priority of the covariate(s) the term is
    built from (lower is preferred); for interactions it is the coarser of the two.
    """

    kind: str
    base_a: str
    order_a: int = 1
    base_b: Optional[str] = None
    order_b: Optional[int] = None
    source_rank: float = 0.0

    @property
    def label(self) -> str:
        label = _factor_label(self.base_a, self.order_a)
        if self.base_b is not None:
            label += ":" + _factor_label(self.base_b, self.order_b or 1)
        return label

    @property
    def is_interaction(self) -> bool:
        return self.kind not in _SINGLE_KINDS

    @property
    def total_order(self) -> int:
        return self.order_a + (self.order_b or 0)

    def priority_key(self, tiebreak: float = 0.0) -> Tuple[float, int, int, float]:
        """(source_rank, kind_rank, total_order, tiebreak); smaller is retained."""
        return (self.source_rank, int(self.is_interaction), self.total_order, tiebreak)

    def evaluate(self, columns: pd.DataFrame) -> np.ndarray:
        """Evaluate this term on a table holding its base columns."""
        values = np.asarray(columns[self.base_a], dtype=float) ** self.order_a
        if self.base_b is not None:
            values = values * np.asarray(columns[self.base_b], dtype=float) ** (self.order_b or 1)
        return values


@dataclass(frozen=True)
class Standardization:
    """Per-column centres and scales estimated on a training matrix."""

    centers: np.ndarray
    scales: np.ndarray

    def __post_init__(self):
        if np.any(np.asarray(self.scales) <= 0):
            raise ValueError("Standardization scales must be positive")

    def take(self, indices: Sequence[int]) -> "Standardization":
        idx = list(indices)
        return Standardization(np.asarray(self.centers)[idx], np.asarray(self.scales)[idx])

    @classmethod
    def identity(cls, p: int) -> "Standardization":
        return cls(np.zeros(p), np.ones(p))


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    columns: Tuple[TermMeta, ...]
    values: np.ndarray
    standardization: Optional[Standardization] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != len(self.columns):
            raise ValueError(
                f"Design values of shape {values.shape} do not match {len(self.columns)} columns"
            )
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "values", values)

    @property
    def labels(self) -> List[str]:
        return [t.label for t in self.columns]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def select(self, indices: Sequence[int]) -> "DesignMatrix":
        idx = list(indices)
        stats = self.standardization.take(idx) if self.standardization is not None else None
        return DesignMatrix(tuple(self.columns[i] for i in idx), self.values[:, idx], stats)

    def rows(self, indices: Sequence[int]) -> "DesignMatrix":
        return DesignMatrix(self.columns, self.values[list(indices)], self.standardization)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=self.labels)

    def terms_frame(self) -> pd.DataFrame:
        """Term metadata as a table, one row per column."""
        return pd.DataFrame([
            {
                "label": t.label, "kind": t.kind, "base_a": t.base_a, "order_a": t.order_a,
                "base_b": t.base_b or "", "order_b": t.order_b or "", "source_rank": t.source_rank,
            }
            for t in self.columns
        ])


def degenerate_columns(values: np.ndarray) -> np.ndarray:
    """Indices of columns whose centred norm is zero up to rounding."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    centers = values.mean(axis=0)
    norms = np.linalg.norm(values - centers, axis=0)
    tol = np.finfo(float).eps * np.maximum(1.0, np.abs(centers)) * np.sqrt(max(n, 1))
    return np.flatnonzero(norms <= tol)
