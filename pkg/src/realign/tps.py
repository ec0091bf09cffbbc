"""
Two-dimensional thin plate spline interpolation.

The interpolant is a0 + a_x*e + a_y*n + sum_i w_i * phi(|p - c_i|) with the
kernel phi(r) = r^2 ln r and the side conditions sum w = sum w*e = sum w*n = 0.
The system is assembled in coordinates relative to the sample centroid so that
large map coordinates do not swamp the affine columns.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from ..data_model.types import GeoPoint, Sample
from ..errors import SingularSystemError

logger = logging.getLogger(__name__)

_EVAL_CHUNK = 2_000_000


@dataclass(frozen=True, eq=False)
class TpsModel:
    """
    A fitted thin plate spline.

    ``affine`` is expressed in absolute coordinates; ``origin`` is the
    centroid used for numerically stable evaluation.
    """

    centers: np.ndarray
    rbf_weights: np.ndarray
    affine: Tuple[float, float, float]
    ridge: float = 0.0
    origin: Tuple[float, float] = (0.0, 0.0)


def tps_kernel(sq_dist: np.ndarray) -> np.ndarray:
    """phi(r) = r^2 ln r written in terms of r^2, with phi(0) = 0."""
    sq_dist = np.asarray(sq_dist, dtype=float)
    out = np.zeros_like(sq_dist)
    positive = sq_dist > 0
    out[positive] = 0.5 * sq_dist[positive] * np.log(sq_dist[positive])
    return out


def tps_fit(samples: Sequence[Sample], ridge: float = 0.0) -> TpsModel:
    """
    Fit a thin plate spline through scattered samples.

    Args:
        samples: (GeoPoint, value) pairs; at least 3, not all collinear, no duplicate locations
        ridge: non-negative value added to the kernel diagonal (0 = exact interpolation)

    Raises:
        SingularSystemError: collinear/duplicate centres or an unsolvable system
    """
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    m = len(samples)
    if m < 3:
        raise SingularSystemError(f"Thin plate spline needs at least 3 samples, got {m}")

    coords = np.array([[p.easting, p.northing] for p, _ in samples], dtype=float)
    values = np.array([v for _, v in samples], dtype=float)

    if np.unique(coords, axis=0).shape[0] < m:
        raise SingularSystemError("Thin plate spline centres contain duplicate locations")

    origin = coords.mean(axis=0)
    local = coords - origin
    P = np.column_stack([np.ones(m), local])
    if np.linalg.matrix_rank(P) < 3:
        raise SingularSystemError("Thin plate spline centres are collinear")

    diff = local[:, None, :] - local[None, :, :]
    K = tps_kernel(np.einsum("ijk,ijk->ij", diff, diff))
    if ridge:
        K = K + ridge * np.eye(m)

    system = np.zeros((m + 3, m + 3))
    system[:m, :m] = K
    system[:m, m:] = P
    system[m:, :m] = P.T
    rhs = np.concatenate([values, np.zeros(3)])

    try:
        solution = linalg.solve(system, rhs, assume_a="sym")
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularSystemError(f"Thin plate spline system could not be solved ({e}); try ridge > 0")
    if not np.all(np.isfinite(solution)):
        raise SingularSystemError("Thin plate spline solution is not finite; try ridge > 0")

    weights = solution[:m]
    b0, bx, by = solution[m:]
    a0 = b0 - bx * origin[0] - by * origin[1]
    return TpsModel(
        centers=coords,
        rbf_weights=weights,
        affine=(float(a0), float(bx), float(by)),
        ridge=float(ridge),
        origin=(float(origin[0]), float(origin[1])),
    )


def tps_eval_many(model: TpsModel, east: np.ndarray, north: np.ndarray) -> np.ndarray:
    """Evaluate the spline at many locations."""
    east = np.asarray(east, dtype=float).ravel()
    north = np.asarray(north, dtype=float).ravel()
    e0, n0 = model.origin
    a0, ax, ay = model.affine
    le, ln = east - e0, north - n0
    out = (a0 + ax * e0 + ay * n0) + ax * le + ay * ln

    centers = model.centers - np.array([e0, n0])
    step = max(1, _EVAL_CHUNK // max(1, len(centers)))
    for start in range(0, east.size, step):
        stop = start + step
        de = le[start:stop, None] - centers[None, :, 0]
        dn = ln[start:stop, None] - centers[None, :, 1]
        out[start:stop] += tps_kernel(de * de + dn * dn) @ model.rbf_weights
    return out


def tps_eval(model: TpsModel, at: GeoPoint) -> float:
    """Evaluate the spline at a single location."""
    return float(tps_eval_many(model, np.array([at.easting]), np.array([at.northing]))[0])
