"""
Subset selectors returning, for every subset size, the best OLS model each
strategy finds: exhaustive branch-and-bound, forward, backward and sequential
replacement. Ties on RSS go to the lowest column index.
"""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..errors import PreconditionError
from .ols import OlsFit, _as_arrays, centred_rss, ols_fit

logger = logging.getLogger(__name__)

EXHAUSTIVE = "exhaustive"
FORWARD = "forward"
BACKWARD = "backward"
SEQREP = "seqrep"
METHODS = (EXHAUSTIVE, FORWARD, BACKWARD, SEQREP)

EXHAUSTIVE_MAX_TERMS = 40
_TIE = 1e-12


@dataclass(frozen=True, eq=False)
class SubsetSequence:
    """Best fit per subset size (size 0 is the intercept-only model)."""

    per_size: Dict[int, OlsFit]
    method: str
    nodes_evaluated: int = 0

    @property
    def sizes(self) -> List[int]:
        return sorted(self.per_size)

    def rss(self, size: int) -> float:
        return self.per_size[size].rss


@dataclass
class _Problem:
    X: np.ndarray
    y: np.ndarray
    Xc: np.ndarray = field(init=False)
    yc: np.ndarray = field(init=False)

    def __post_init__(self):
        self.Xc = self.X - self.X.mean(axis=0)
        self.yc = self.y - self.y.mean()

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def tss(self) -> float:
        return float(self.yc @ self.yc)

    def rss(self, subset: Sequence[int]) -> float:
        return centred_rss(self.Xc, self.yc, subset)

    def bound(self, subset: Sequence[int]) -> float:
        """Lowest RSS reachable by any superset within ``subset`` (least squares, collinearity allowed)."""
        cols = list(subset)
        if not cols:
            return self.tss
        coef = np.linalg.lstsq(self.Xc[:, cols], self.yc, rcond=None)[0]
        resid = self.yc - self.Xc[:, cols] @ coef
        return float(resid @ resid)

    def best_addition(self, subset: Sequence[int]) -> Tuple[Optional[int], float]:
        chosen, best = None, np.inf
        current = set(subset)
        for j in range(self.p):
            if j in current:
                continue
            rss = self.rss(list(subset) + [j])
            if rss < best:
                chosen, best = j, rss
        return chosen, best


def _problem(X, y) -> _Problem:
    X, y = _as_arrays(X, y)
    return _Problem(X, y)


def _check_max_size(max_size: Optional[int], n: int, p: int) -> int:
    if max_size is None:
        max_size = min(p, n - 2)
    if max_size < 0:
        raise PreconditionError(f"max_size must be non-negative, got {max_size}")
    if max_size >= n:
        raise PreconditionError(f"max_size {max_size} must be smaller than the {n} observations")
    return min(max_size, p)


def _sequence(problem: _Problem, subsets: Dict[int, Sequence[int]], method: str,
              nodes: int = 0) -> SubsetSequence:
    per_size = {
        size: ols_fit(problem.X, problem.y, sorted(subset))
        for size, subset in sorted(subsets.items())
    }
    return SubsetSequence(per_size, method, nodes)


def forward_select(X: np.ndarray, y: np.ndarray, max_size: Optional[int] = None) -> SubsetSequence:
    """Add the RSS-minimizing column at every step."""
    problem = _problem(X, y)
    max_size = _check_max_size(max_size, problem.n, problem.p)
    subset: List[int] = []
    subsets: Dict[int, Sequence[int]] = {0: ()}
    for size in range(1, max_size + 1):
        j, _ = problem.best_addition(subset)
        if j is None:
            logger.warning(f"Forward selection stopped at size {size - 1}: every remaining column is collinear")
            break
        subset = subset + [j]
        subsets[size] = tuple(subset)
    return _sequence(problem, subsets, FORWARD)


def backward_select(X: np.ndarray, y: np.ndarray, min_size: int = 0) -> SubsetSequence:
    """
    Start from all columns and remove the one whose removal increases RSS least.

    Raises:
        PreconditionError: p >= n, so the full OLS fit does not exist
    """
    problem = _problem(X, y)
    if problem.p >= problem.n:
        raise PreconditionError(
            f"Backward selection needs fewer columns ({problem.p}) than observations ({problem.n})"
        )
    ols_fit(problem.X, problem.y, range(problem.p))
    subset = list(range(problem.p))
    subsets: Dict[int, Sequence[int]] = {problem.p: tuple(subset)}
    while len(subset) > max(min_size, 0):
        drop, best = None, np.inf
        for j in subset:
            rss = problem.rss([k for k in subset if k != j])
            if rss < best:
                drop, best = j, rss
        subset.remove(drop)
        subsets[len(subset)] = tuple(subset)
    return _sequence(problem, subsets, BACKWARD)


def _swap_phase(problem: _Problem, subset: List[int], rss: float) -> Tuple[List[int], float]:
    tol = _TIE * max(problem.tss, 1e-300)
    for _ in range(50 * max(problem.p, 1)):
        move, best = None, rss
        members = set(subset)
        for pos in range(len(subset)):
            for j in range(problem.p):
                if j in members:
                    continue
                trial = subset[:pos] + [j] + subset[pos + 1:]
                trial_rss = problem.rss(trial)
                if trial_rss < best - tol:
                    move, best = (pos, j), trial_rss
        if move is None:
            break
        subset = subset[:move[0]] + [move[1]] + subset[move[0] + 1:]
        rss = best
    return subset, rss


def seqrep_select(X: np.ndarray, y: np.ndarray, max_size: Optional[int] = None) -> SubsetSequence:
    """
    Forward steps, each followed by single-column swaps while a swap lowers RSS.

    Every size starts its swap phase from the better of the previous subset
    plus its best addition and the plain forward subset of that size.
    """
    problem = _problem(X, y)
    max_size = _check_max_size(max_size, problem.n, problem.p)
    forward = forward_select(problem.X, problem.y, max_size)

    subset: List[int] = []
    subsets: Dict[int, Sequence[int]] = {0: ()}
    for size in range(1, max_size + 1):
        j, rss = problem.best_addition(subset)
        start = subset + [j] if j is not None else None
        if size in forward.per_size and (start is None or forward.rss(size) < rss):
            start, rss = list(forward.per_size[size].terms), forward.rss(size)
        if start is None:
            break
        subset, _ = _swap_phase(problem, start, rss)
        subsets[size] = tuple(subset)
    return _sequence(problem, subsets, SEQREP)


def exhaustive_best(X: np.ndarray, y: np.ndarray, max_size: Optional[int] = None,
                    allow_large: bool = False) -> SubsetSequence:
    """
    Best subset of every size by depth-first branch-and-bound.

    A subtree of subsets extending S with columns from {k, ..., p-1} is skipped
    when the least-squares RSS of S plus all those columns already exceeds the
    incumbent of every size the subtree can still reach.

    Raises:
        PreconditionError: more than 40 columns without ``allow_large``
    """
    problem = _problem(X, y)
    p = problem.p
    if p > EXHAUSTIVE_MAX_TERMS and not allow_large:
        raise PreconditionError(
            f"Exhaustive search over {p} terms spans {2.0 ** p - 1:.3g} models "
            f"(28 terms already span 2.68e8); enable allow_large_exhaustive to proceed"
        )
    max_size = _check_max_size(max_size, problem.n, p)
    tol = _TIE * max(problem.tss, 1e-300)

    forward = forward_select(problem.X, problem.y, max_size)
    best_rss = np.full(max_size + 1, np.inf)
    best_set: List[Tuple[int, ...]] = [()] * (max_size + 1)
    for size, fit in forward.per_size.items():
        best_rss[size], best_set[size] = fit.rss, fit.terms

    nodes = 0
    stack: List[Tuple[Tuple[int, ...], int]] = [((), 0)]
    while stack:
        subset, k = stack.pop()
        nodes += 1
        size = len(subset)
        if size:
            rss = problem.rss(subset)
            if rss < best_rss[size] - tol:
                best_rss[size], best_set[size] = rss, subset
        if size == max_size or k >= p:
            continue
        reachable = range(size + 1, min(size + p - k, max_size) + 1)
        bound = problem.bound(subset + tuple(range(k, p)))
        if all(bound > best_rss[s] + tol for s in reachable):
            continue
        for j in range(p - 1, k - 1, -1):
            stack.append((subset + (j,), j + 1))

    total = sum(comb(p, i) for i in range(1, p + 1))
    logger.info(
        f"Branch-and-bound over {p} terms: {nodes} nodes evaluated out of {total} possible models"
    )
    found = {s: best_set[s] for s in range(max_size + 1) if np.isfinite(best_rss[s])}
    return _sequence(problem, found, EXHAUSTIVE, nodes)


def sequence_frame(sequence: SubsetSequence, labels: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Diagnostic dump of the per-size winners."""
    rows = []
    for size in sequence.sizes:
        fit = sequence.per_size[size]
        names = [labels[j] if labels is not None else str(j) for j in fit.terms]
        rows.append({"size": size, "terms": ";".join(names), "rss": fit.rss})
    return pd.DataFrame(rows, columns=["size", "terms", "rss"])
