"""
Stage runner behind the command-line front end.

Each public ``run_*`` method produces the files of one command under the
configured output directory and records its wall time; ``write_metadata``
writes the sidecar that ties every output to the config hash and seed.
"""

import logging
import os
import time
from contextlib import contextmanager
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from ..config.run_config import RunConfig
from ..data_model.loaders import load_dataset, load_manifest, load_raster
from ..data_model.types import Dataset, GeoPoint, RasterGrid
from ..design.expand import expand_terms
from ..design.prefilter import correlated_terms, prefilter_mccm
from ..ensemble.ensemble import model_averaged_predict, r_squared
from ..ensemble.pipeline import CovariateFit, fit_covariate_model, sweep
from ..ensemble.reports import write_csv, write_ensemble_reports
from ..ensemble.selection import candidate_trace
from ..ensemble.splits import derive_seed
from ..errors import ConfigError, DataError
from ..realign.realign import realign_at, realigned_frame, split_realigned_frame
from ..spatial_raster.pixels import build_pixel_rows
from ..spatial_raster.residuals import residuals, spatial_ensemble, spatial_rows
from ..spatial_raster.stack import member_stack_frame, predict_full_cover, summarize_stack, write_outputs

logger = logging.getLogger(__name__)

METADATA_FILE = "run_metadata.yaml"


class SoilMapPipeline:
    """Runs pipeline commands for one validated RunConfig."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.output_dir = config.output_dir
        self.stage_seconds: Dict[str, float] = {}
        self.outputs: Dict[str, str] = {}
        self._stage_count = 0
        self._dataset: Optional[Dataset] = None
        os.makedirs(self.output_dir, exist_ok=True)

    def banner(self, command: str, log_file: Optional[str] = None):
        logger.info("=" * 60)
        logger.info("SOIL MAPPING SESSION STARTED")
        logger.info("=" * 60)
        logger.info(f"Command: {command}")
        logger.info(f"Config hash: {self.config.config_hash()}")
        logger.info(f"Seed: {self.config.seed}")
        logger.info(f"Output directory: {self.output_dir}")
        if log_file:
            logger.info(f"Log file: {log_file}")
        logger.debug(f"Worker threads: {self.config.workers}")

    @contextmanager
    def stage(self, label: str):
        self._stage_count += 1
        number = self._stage_count
        logger.info(f"STAGE {number}: {label}")
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        self.stage_seconds[label] = round(elapsed, 3)
        logger.info(f"STAGE {number} finished in {elapsed:.2f} s")

    def _path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _record(self, key: str, path: str) -> str:
        self.outputs[key] = path
        return path

    # -- inputs ---------------------------------------------------------------

    def dataset(self) -> Dataset:
        if self._dataset is None:
            self.config.require("manifest")
            self._dataset = load_dataset(self.config.manifest, self.config.response_column)
        return self._dataset

    def ranks(self) -> Dict[str, float]:
        if not self.config.manifest:
            return {}
        manifest = load_manifest(self.config.manifest)
        return {c["name"]: float(c["priority_rank"]) for c in manifest["covariates"]}

    def realigned(self) -> Tuple[pd.DataFrame, np.ndarray, List[GeoPoint]]:
        """The realigned table, read from ``realigned_table`` when set, else computed."""
        if self.config.realigned_table:
            frame = pd.read_csv(self.config.realigned_table)
            missing = [c for c in ("easting", "northing", "response") if c not in frame.columns]
            if missing:
                raise DataError(f"{self.config.realigned_table}: missing columns {', '.join(missing)}")
            logger.info(f"Using realigned table {self.config.realigned_table}")
            return split_realigned_frame(frame)
        dataset = self.dataset()
        with self.stage("realigning covariates"):
            table = realign_at(dataset, dataset.locations(), self.config.realign_config(),
                               threads=self.config.workers)
        return table, dataset.response_values(), dataset.locations()

    def prediction_geometry(self) -> RasterGrid:
        if self.config.prediction_grid:
            return load_raster(self.config.prediction_grid)
        rasters = {c.name: c for c in self.dataset().raster_covariates}
        for name in self.dataset().covariate_order:
            if name in rasters:
                return rasters[name].grid
        raise ConfigError(
            "No output grid",
            ["prediction_grid: required when the manifest has no raster covariates"],
        )

    # -- commands -------------------------------------------------------------

    def run_realign(self) -> str:
        dataset = self.dataset()
        table, _, _ = self.realigned()
        return self._record("realigned", write_csv(realigned_frame(dataset, table), self._path("realigned.csv")))

    def run_expand(self) -> Dict[str, str]:
        table, _, _ = self.realigned()
        with self.stage("expanding design"):
            expanded = expand_terms(table, self.config.max_order, self.config.pairwise, self.ranks())
            design, drop_log = prefilter_mccm(expanded, self.config.mccm, derive_seed(self.config.seed or 0, "mccm"))
        self._record("design", write_csv(design.to_frame(), self._path("design.csv")))
        self._record("terms", write_csv(design.terms_frame(), self._path("terms.csv")))
        self._record("drop_log", write_csv(drop_log, self._path("drop_log.csv")))
        return dict(self.outputs)

    def _fit_covariates(self, table: pd.DataFrame, y: np.ndarray) -> CovariateFit:
        with self.stage("fitting covariate ensemble"):
            fit = fit_covariate_model(
                table, y, self.config.cv_settings(), self.config.seed,
                mccm=self.config.mccm, max_order=self.config.max_order,
                pairwise=self.config.pairwise, ranks=self.ranks(),
            )
        reports = write_ensemble_reports(
            fit.ensemble, self.output_dir, fit.mccm, fit.r2, correlated_terms(fit.drop_log),
        )
        for key, path in reports.items():
            self._record(key, path)
        self._record("drop_log", write_csv(fit.drop_log, self._path("drop_log.csv")))
        if self.config.dump_members:
            trace = candidate_trace(fit.design, y, fit.ensemble.splits[0], fit.ensemble.selector,
                                    self.config.cv_settings().selector_config())
            self._record("candidate_trace", write_csv(trace, self._path("candidate_trace.csv")))
        return fit

    def run_select(self) -> CovariateFit:
        self.config.require("seed")
        table, y, _ = self.realigned()
        return self._fit_covariates(table, y)

    def run_sweep(self) -> pd.DataFrame:
        self.config.require("seed")
        table, y, _ = self.realigned()
        configs = [(t, m) for t in self.config.sweep_train_sizes for m in self.config.sweep_mccm]
        with self.stage(f"sweeping {len(configs)} configurations"):
            frame = sweep(
                table, y, configs, self.config.cv_settings(), self.config.seed,
                max_order=self.config.max_order, pairwise=self.config.pairwise, ranks=self.ranks(),
            )
        self._record("sweep", write_csv(frame, self._path("sweep.csv")))
        return frame

    def run_predict(self) -> Dict[str, str]:
        self.config.require("seed", "manifest")
        dataset = self.dataset()
        table, y, locations = self.realigned()
        fit = self._fit_covariates(table, y)

        with self.stage("fitting spatial residual ensemble"):
            r = residuals(fit.ensemble, fit.design.values, y)
            spatial = spatial_ensemble(
                locations, r, self.config.cv_settings(), self.config.seed,
                splits=fit.ensemble.splits, mccm=self.config.spatial_mccm,
                single_max=self.config.spatial_single_max,
                inter_total_max=self.config.spatial_inter_total_max,
            )
            spatial_fitted = model_averaged_predict(spatial, spatial_rows(spatial, locations))
        spatial_r2 = r_squared(r, spatial_fitted) if np.ptp(r) > 0 else float("nan")
        logger.info(f"Covariate plus spatial R-squared {r_squared(y, fit.fitted + spatial_fitted):.4f}")
        spatial_reports = write_ensemble_reports(
            spatial, self.output_dir, self.config.spatial_mccm, spatial_r2, prefix="spatial_",
        )
        for key, path in spatial_reports.items():
            self._record(f"spatial_{key}", path)

        geometry = self.prediction_geometry()
        with self.stage("realigning covariates to pixels"):
            pixels = build_pixel_rows(dataset, geometry, self.config.realign_config(), self.config.workers)
        with self.stage("predicting full cover"):
            stack = predict_full_cover(
                fit.ensemble, spatial, pixels.table, pixels.coords, geometry,
                self.config.pairing, pixels.valid,
            )
            rasters = summarize_stack(stack, self.config.central)
        for key, path in write_outputs(rasters, self.output_dir).items():
            self._record(key, path)
        if self.config.dump_members:
            self._record("member_stack", write_csv(member_stack_frame(stack), self._path("member_stack.csv")))
        return dict(self.outputs)

    def write_metadata(self, command: str) -> str:
        """Write the sidecar naming the config hash, seed, stage times and outputs."""
        record = {
            "command": command,
            "config_hash": self.config.config_hash(),
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "stage_seconds": dict(self.stage_seconds),
            "outputs": {k: os.path.basename(v) for k, v in sorted(self.outputs.items())},
        }
        path = self._path(METADATA_FILE)
        with open(path, "w", encoding="utf-8") as handle:
            yaml.safe_dump(record, handle, sort_keys=False)
        return path
