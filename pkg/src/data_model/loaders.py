"""
Readers and writers for point CSV files, ESRI ASCII grids and the covariate manifest.
"""

import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import yaml
from jsonschema import Draft7Validator

from ..errors import ConfigError, DataError, ParseError, RasterFormatError, SchemaError
from .types import (
    Dataset,
    GeoPoint,
    PointCovariate,
    RasterCovariate,
    RasterGrid,
    ResponseObservation,
    Sample,
)
from .vegetation import INDEX_NAMES, vegetation_indices

logger = logging.getLogger(__name__)

EASTING = "easting"
NORTHING = "northing"

_REQUIRED_HEADER = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")

MANIFEST_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["response", "covariates"],
    "properties": {
        "response": {
            "type": "object",
            "required": ["path", "value_column"],
            "properties": {
                "path": {"type": "string"},
                "value_column": {"type": "string"},
            },
        },
        "covariates": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["name", "kind", "path"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "kind": {"enum": ["point", "raster"]},
                    "path": {"type": "string"},
                    "value_column": {"type": "string"},
                    "priority_rank": {"type": "number"},
                    "derive": {
                        "type": "object",
                        "required": ["index"],
                        "properties": {
                            "index": {"enum": list(INDEX_NAMES)},
                            "nir_column": {"type": "string"},
                            "red_column": {"type": "string"},
                            "soil_factor": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
            },
        },
    },
}


def _require_file(path: str):
    if not os.path.isfile(path):
        raise DataError(f"Input file {path} not found")


def _read_numeric_columns(path: str, columns: Sequence[str]) -> Dict[str, np.ndarray]:
    """Read the named columns of a CSV as floats, reporting the first bad cell by data row."""
    _require_file(path)
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    frame.columns = [c.strip() for c in frame.columns]
    for column in columns:
        if column not in frame.columns:
            raise SchemaError(f"{path}: missing column '{column}'", column=column, path=path)

    parsed: Dict[str, np.ndarray] = {}
    for column in columns:
        values = pd.to_numeric(frame[column].str.strip(), errors="coerce").to_numpy(dtype=float)
        bad = np.flatnonzero(~np.isfinite(values))
        if bad.size:
            row = int(bad[0]) + 1
            raise ParseError(
                f"{path}: row {row}, column '{column}': "
                f"cannot parse '{frame[column].iloc[bad[0]]}' as a number",
                row=row, column=column, path=path,
            )
        parsed[column] = values
    return parsed


def load_points(path: str, value_column: str,
                easting_column: str = EASTING,
                northing_column: str = NORTHING) -> List[Sample]:
    """
    Load point samples from a CSV file with a header row.

    Args:
        path: CSV file path
        value_column: name of the column holding the sample values

    Returns:
        One (GeoPoint, value) record per data row, in file order
    """
    columns = _read_numeric_columns(path, [easting_column, northing_column, value_column])
    records = [
        (GeoPoint(float(e), float(n)), float(v))
        for e, n, v in zip(columns[easting_column], columns[northing_column], columns[value_column])
    ]
    logger.debug(f"Loaded {len(records)} points from {path}")
    return records


def load_derived_points(path: str, index: str, nir_column: str = "nir",
                        red_column: str = "red", soil_factor: float = 0.5) -> List[Sample]:
    """Compute a vegetation index per sample from NIR and RED columns, dropping undefined samples."""
    columns = _read_numeric_columns(path, [EASTING, NORTHING, nir_column, red_column])
    records: List[Sample] = []
    skipped = 0
    for e, n, nir, red in zip(columns[EASTING], columns[NORTHING], columns[nir_column], columns[red_column]):
        value = vegetation_indices(float(nir), float(red), soil_factor, strict=False)[index]
        if np.isnan(value):
            skipped += 1
            continue
        records.append((GeoPoint(float(e), float(n)), value))
    if skipped:
        logger.warning(f"{path}: {index} undefined for {skipped} samples, dropped")
    return records


def _parse_header_value(key: str, token: str, path: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise RasterFormatError(f"{path}: header '{key}' has non-numeric value '{token}'", path=path)


def load_raster(path: str) -> RasterGrid:
    """
    Read an ESRI ASCII grid.

    Header keys are case-insensitive; ``xllcenter``/``yllcenter`` are converted
    to corners. The first data row is the northernmost row.
    """
    _require_file(path)
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().splitlines()

    header: Dict[str, float] = {}
    body_start = 0
    for i, line in enumerate(lines):
        parts = line.split()
        if not parts:
            continue
        if not parts[0][0].isalpha():
            body_start = i
            break
        if len(parts) != 2:
            raise RasterFormatError(f"{path}: malformed header line '{line}'", path=path)
        header[parts[0].lower()] = _parse_header_value(parts[0], parts[1], path)
        body_start = i + 1

    cellsize = header.get("cellsize")
    if "xllcenter" in header and "xllcorner" not in header and cellsize is not None:
        header["xllcorner"] = header["xllcenter"] - cellsize / 2.0
    if "yllcenter" in header and "yllcorner" not in header and cellsize is not None:
        header["yllcorner"] = header["yllcenter"] - cellsize / 2.0

    missing = [k for k in _REQUIRED_HEADER if k not in header]
    if missing:
        raise RasterFormatError(f"{path}: missing header keys {', '.join(missing)}", path=path)

    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    tokens = " ".join(lines[body_start:]).split()
    if len(tokens) != ncols * nrows:
        raise RasterFormatError(
            f"{path}: expected {ncols * nrows} values for {ncols} x {nrows} grid, found {len(tokens)}",
            path=path,
        )
    try:
        values = np.array(tokens, dtype=float)
    except ValueError as e:
        raise RasterFormatError(f"{path}: non-numeric grid value ({e})", path=path)

    return RasterGrid(
        xllcorner=header["xllcorner"],
        yllcorner=header["yllcorner"],
        cellsize=header["cellsize"],
        ncols=ncols,
        nrows=nrows,
        values=values,
        nodata=header.get("nodata_value"),
    )


def _format_number(value: float) -> str:
    value = float(value)
    if value.is_integer() and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


def write_raster(grid: RasterGrid, path: str) -> None:
    """Write a grid as ESRI ASCII using the shortest round-trip decimal for every number."""
    lines = [
        f"ncols {grid.ncols}",
        f"nrows {grid.nrows}",
        f"xllcorner {_format_number(grid.xllcorner)}",
        f"yllcorner {_format_number(grid.yllcorner)}",
        f"cellsize {_format_number(grid.cellsize)}",
    ]
    if grid.nodata is not None:
        lines.append(f"NODATA_value {_format_number(grid.nodata)}")
    for row in grid.values:
        lines.append(" ".join(_format_number(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def load_manifest(path: str) -> Dict[str, Any]:
    """Load and validate a covariate manifest, resolving file paths against its directory."""
    _require_file(path)
    with open(path, "r", encoding="utf-8") as handle:
        manifest = yaml.safe_load(handle) or {}

    errors = sorted(Draft7Validator(MANIFEST_SCHEMA).iter_errors(manifest), key=lambda e: list(e.path))
    if errors:
        raise ConfigError(
            f"Manifest {path} is invalid",
            [f"{'.'.join(str(p) for p in e.path) or '<root>'}: {e.message}" for e in errors],
        )

    names = [c["name"] for c in manifest["covariates"]]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ConfigError(f"Manifest {path} is invalid", [f"duplicate covariate name '{n}'" for n in duplicates])

    base = os.path.dirname(os.path.abspath(path))
    manifest["response"]["path"] = os.path.join(base, manifest["response"]["path"])
    for record in manifest["covariates"]:
        record["path"] = os.path.join(base, record["path"])
        record.setdefault("priority_rank", 0)
    return manifest


def load_dataset(manifest_path: str, response_column: Optional[str] = None) -> Dataset:
    """Assemble a Dataset from a manifest file."""
    manifest = load_manifest(manifest_path)
    response = manifest["response"]
    column = response_column or response["value_column"]
    responses = tuple(
        ResponseObservation(location, value)
        for location, value in load_points(response["path"], column)
    )

    points: List[PointCovariate] = []
    rasters: List[RasterCovariate] = []
    for record in manifest["covariates"]:
        name, rank = record["name"], float(record["priority_rank"])
        if record["kind"] == "raster":
            rasters.append(RasterCovariate(name, load_raster(record["path"]), rank))
            continue
        derive = record.get("derive")
        if derive:
            samples = load_derived_points(
                record["path"], derive["index"],
                derive.get("nir_column", "nir"), derive.get("red_column", "red"),
                derive.get("soil_factor", 0.5),
            )
        else:
            if "value_column" not in record:
                raise ConfigError(f"Manifest {manifest_path} is invalid",
                                  [f"covariate '{name}': point covariates need value_column or derive"])
            samples = load_points(record["path"], record["value_column"])
        points.append(PointCovariate.from_samples(name, samples, rank))

    dataset = Dataset(
        responses=responses,
        point_covariates=tuple(points),
        raster_covariates=tuple(rasters),
        covariate_order=tuple(r["name"] for r in manifest["covariates"]),
    )
    logger.info(
        f"Dataset loaded: {dataset.n} responses, {len(points)} point covariates, "
        f"{len(rasters)} raster covariates"
    )
    return dataset
