"""
Synthetic data: the term-recovery design and a small on-disk field survey
(responses, point surveys, rasters and manifest) for end-to-end runs.
"""

import os
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np
import pandas as pd
import yaml

from .loaders import write_raster
from .types import RasterGrid

RECOVERY_TERMS = ("x3", "x7^2", "x1:x2")


def recovery_truth(X: pd.DataFrame) -> np.ndarray:
    """Noise-free response 2*x3 + x7^2 - 1.5*x1*x2."""
    return 2.0 * X["x3"] + X["x7"] ** 2 - 1.5 * X["x1"] * X["x2"]


def recovery_design(n: int = 60, p: int = 20, sigma: float = 0.25,
                    seed: int = 0) -> Tuple[pd.DataFrame, np.ndarray, np.ndarray]:
    """
    Standard normal covariates x1..xp and a response built from three known terms.

    Returns:
        Tuple of (covariate table, noisy response, noise-free response)
    """
    if p < 7:
        raise ValueError("The recovery design needs at least 7 covariates")
    rng = np.random.default_rng(seed)
    X = pd.DataFrame(rng.standard_normal((n, p)), columns=[f"x{j}" for j in range(1, p + 1)])
    truth = recovery_truth(X).to_numpy()
    return X, truth + sigma * rng.standard_normal(n), truth


@dataclass(frozen=True)
class FieldFixture:
    directory: str
    manifest: str
    responses: str
    grid: str


# smooth fields over the fixture extent, in metres from the south-west corner
def _elevation(dx, dy):
    return 100.0 + 0.04 * dx + 0.02 * dy + 2.0 * np.sin(dx / 60.0) * np.cos(dy / 80.0)


def _wetness(dx, dy):
    return 5.0 + np.cos(dx / 50.0) + 0.5 * np.sin(dy / 40.0)


def _eca(dx, dy):
    return 20.0 + 0.03 * dx + 4.0 * np.exp(-((dx - 90.0) ** 2 + (dy - 110.0) ** 2) / 3000.0)


def _nir(dx, dy):
    return 0.45 + 0.1 * np.sin(dx / 70.0) + 0.0005 * dy


def _red(dx, dy):
    return 0.08 + 0.03 * np.cos(dy / 55.0)


def _soc(dx, dy):
    eca = _eca(dx, dy)
    ndvi = (_nir(dx, dy) - _red(dx, dy)) / (_nir(dx, dy) + _red(dx, dy))
    return 0.5 + 0.08 * eca + 1.2 * ndvi - 0.01 * (_elevation(dx, dy) - 100.0) + 0.002 * dy


def write_fixture(directory: str, seed: int = 0, n_responses: int = 60, ncols: int = 16, nrows: int = 16,
                  cellsize: float = 10.0, noise: float = 0.05) -> FieldFixture:
    """
    Write a synthetic field survey under ``directory``.

    Two rasters (elevation, wetness) cover the field; an ECA survey and a
    reflectance survey (NIR/RED, turned into NDVI by the manifest) are point
    covariates; responses sit inside the field away from its edge.
    """
    os.makedirs(directory, exist_ok=True)
    rng = np.random.default_rng(seed)
    x0, y0 = 1000.0, 2000.0
    width, height = ncols * cellsize, nrows * cellsize

    geometry = RasterGrid(x0, y0, cellsize, ncols, nrows, np.zeros(ncols * nrows), nodata=-9999.0)
    centers = geometry.cell_centers()
    dx, dy = centers[:, 0] - x0, centers[:, 1] - y0
    paths: Dict[str, str] = {}
    for name, field in (("elevation", _elevation), ("wetness", _wetness)):
        paths[name] = os.path.join(directory, f"{name}.asc")
        write_raster(geometry.with_values(np.round(field(dx, dy), 6).reshape(nrows, ncols)), paths[name])

    margin = 20.0
    rx = rng.uniform(margin, width - margin, n_responses)
    ry = rng.uniform(margin, height - margin, n_responses)
    responses = pd.DataFrame({
        "easting": np.round(x0 + rx, 3),
        "northing": np.round(y0 + ry, 3),
        "soc": np.round(_soc(rx, ry) + noise * rng.standard_normal(n_responses), 6),
    })
    paths["responses"] = os.path.join(directory, "responses.csv")
    responses.to_csv(paths["responses"], index=False, lineterminator="\n")

    ex = rng.uniform(-5.0, width + 5.0, 150)
    ey = rng.uniform(-5.0, height + 5.0, 150)
    eca = pd.DataFrame({
        "easting": np.round(x0 + ex, 3), "northing": np.round(y0 + ey, 3),
        "eca": np.round(_eca(ex, ey), 6),
    })
    paths["eca"] = os.path.join(directory, "eca.csv")
    eca.to_csv(paths["eca"], index=False, lineterminator="\n")

    fx = rng.uniform(-5.0, width + 5.0, 120)
    fy = rng.uniform(-5.0, height + 5.0, 120)
    reflectance = pd.DataFrame({
        "easting": np.round(x0 + fx, 3), "northing": np.round(y0 + fy, 3),
        "nir": np.round(_nir(fx, fy), 6), "red": np.round(_red(fx, fy), 6),
    })
    paths["reflectance"] = os.path.join(directory, "reflectance.csv")
    reflectance.to_csv(paths["reflectance"], index=False, lineterminator="\n")

    manifest = {
        "response": {"path": "responses.csv", "value_column": "soc"},
        "covariates": [
            {"name": "ECA", "kind": "point", "path": "eca.csv", "value_column": "eca", "priority_rank": 1},
            {"name": "NDVI", "kind": "point", "path": "reflectance.csv", "priority_rank": 2,
             "derive": {"index": "NDVI", "nir_column": "nir", "red_column": "red"}},
            {"name": "wetness", "kind": "raster", "path": "wetness.asc", "priority_rank": 6},
            {"name": "elevation", "kind": "raster", "path": "elevation.asc", "priority_rank": 7},
        ],
    }
    manifest_path = os.path.join(directory, "manifest.yaml")
    with open(manifest_path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(manifest, handle, sort_keys=False)

    return FieldFixture(directory, manifest_path, paths["responses"], paths["elevation"])
