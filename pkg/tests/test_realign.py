#!/usr/bin/env python3
"""
Tests for thin plate spline fitting and block realignment.
"""

import unittest

import numpy as np

from src.data_model import Dataset, GeoPoint, PointCovariate, RasterGrid, ResponseObservation
from src.data_model.types import RasterCovariate
from src.errors import CoverageError, SingularSystemError
from src.realign import (
    BlockSpec,
    RealignConfig,
    block_lattice,
    block_mean_point,
    block_mean_raster,
    realign_at,
    realign_dataset,
    tps_eval,
    tps_eval_many,
    tps_fit,
)


def _plane(e, n):
    return 2.0 + 0.5 * e - 1.0 * n


def _samples(points, field):
    return [(GeoPoint(float(e), float(n)), float(field(e, n))) for e, n in points]


class TestThinPlateSpline(unittest.TestCase):
    """Test cases for the TPS interpolant."""

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_constant_samples(self):
        """Test samples with one value give that value everywhere."""
        points = self.rng.uniform(0, 50, (6, 2))
        model = tps_fit(_samples(points, lambda e, n: 4.2))

        np.testing.assert_allclose(model.rbf_weights, 0.0, atol=1e-8)
        self.assertAlmostEqual(tps_eval(model, GeoPoint(17.0, -3.0)), 4.2, places=8)
        self.assertAlmostEqual(model.affine[0], 4.2, places=8)

    def test_plane_reproduced(self):
        """Test a plane through 4 non-collinear points is reproduced exactly."""
        points = [(0, 0), (10, 0), (0, 10), (7, 9)]
        model = tps_fit(_samples(points, _plane))

        np.testing.assert_allclose(model.rbf_weights, 0.0, atol=1e-8)
        np.testing.assert_allclose(model.affine, (2.0, 0.5, -1.0), atol=1e-8)
        self.assertAlmostEqual(tps_eval(model, GeoPoint(10, 20)), -13.0, places=8)

    def test_exact_interpolation(self):
        """Test evaluation at each centre returns the sample value."""
        points = self.rng.uniform(0, 100, (10, 2))
        values = self.rng.normal(size=10)
        samples = [(GeoPoint(e, n), v) for (e, n), v in zip(points, values)]
        model = tps_fit(samples)

        fitted = tps_eval_many(model, points[:, 0], points[:, 1])
        np.testing.assert_allclose(fitted, values, atol=1e-8)

    def test_side_conditions(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            points = rng.uniform(1e5, 1e5 + 300, (25, 2))
            samples = [(GeoPoint(e, n), v) for (e, n), v in zip(points, rng.normal(size=25))]
            model = tps_fit(samples)
            w = model.rbf_weights
            scale = np.abs(w).sum()

            self.assertLess(abs(w.sum()), 1e-8 * max(1.0, scale))
            self.assertLess(abs(w @ (points[:, 0] - 1e5)), 1e-6 * max(1.0, scale))
            self.assertLess(abs(w @ (points[:, 1] - 1e5)), 1e-6 * max(1.0, scale))

    def test_large_coordinates_still_interpolate(self):
        points = self.rng.uniform(0, 200, (15, 2)) + np.array([535_000.0, 6_198_000.0])
        values = self.rng.normal(size=15)
        model = tps_fit([(GeoPoint(e, n), v) for (e, n), v in zip(points, values)])
        np.testing.assert_allclose(tps_eval_many(model, points[:, 0], points[:, 1]), values, atol=1e-7)

    def test_collinear_centres_rejected(self):
        samples = _samples([(0, 0), (1, 1), (2, 2), (3, 3)], _plane)
        with self.assertRaises(SingularSystemError):
            tps_fit(samples)

    def test_duplicate_centres_rejected(self):
        samples = _samples([(0, 0), (1, 0), (0, 1), (1, 0)], _plane)
        with self.assertRaises(SingularSystemError):
            tps_fit(samples)

    def test_ridge_smooths(self):
        points = self.rng.uniform(0, 100, (12, 2))
        values = self.rng.normal(size=12)
        model = tps_fit([(GeoPoint(e, n), v) for (e, n), v in zip(points, values)], ridge=10.0)
        fitted = tps_eval_many(model, points[:, 0], points[:, 1])
        self.assertGreater(np.abs(fitted - values).max(), 1e-6)


class TestBlocks(unittest.TestCase):
    """Test cases for lattice block means."""

    def setUp(self):
        points = [(0, 0), (40, 0), (0, 40), (40, 40), (15, 25)]
        self.plane_model = tps_fit(_samples(points, _plane))

    def test_lattice_symmetric(self):
        east, north = block_lattice(BlockSpec(GeoPoint(0.0, 0.0), side=1.0, grid_n=100))

        self.assertEqual(east.size, 10_000)
        self.assertAlmostEqual(east.mean(), 0.0, places=12)
        # mean of squared sub-cell centre offsets over a unit side
        expected = (1.0 - 1.0 / 100 ** 2) / 12.0
        self.assertAlmostEqual(np.mean(east ** 2), expected, places=12)
        self.assertLess(np.abs(east).max(), 0.5)

    def test_plane_block_mean_is_centre_value(self):
        block = BlockSpec(GeoPoint(20.0, 18.0), side=25.0, grid_n=20)
        self.assertAlmostEqual(block_mean_point(self.plane_model, block), _plane(20.0, 18.0), places=7)

    def test_small_block_converges_to_point(self):
        points = np.random.default_rng(2).uniform(0, 50, (12, 2))
        values = np.sin(points[:, 0] / 10.0) + points[:, 1] / 50.0
        model = tps_fit([(GeoPoint(e, n), v) for (e, n), v in zip(points, values)])
        center = GeoPoint(21.0, 30.0)

        value = block_mean_point(model, BlockSpec(center, side=1e-6, grid_n=4))
        self.assertAlmostEqual(value, tps_eval(model, center), delta=1e-6)

    def test_block_mean_linear_in_sample_values(self):
        rng = np.random.default_rng(5)
        points = rng.uniform(0, 60, (15, 2))
        values = rng.normal(size=15)
        block = BlockSpec(GeoPoint(30.0, 25.0), side=25.0, grid_n=30)
        base = block_mean_point(tps_fit([(GeoPoint(e, n), v) for (e, n), v in zip(points, values)]), block)

        for alpha in (-2.5, 0.1, 3.0, 1e3):
            scaled = tps_fit([(GeoPoint(e, n), alpha * v) for (e, n), v in zip(points, values)])
            self.assertAlmostEqual(block_mean_point(scaled, block), alpha * base, delta=1e-9 * max(1.0, abs(alpha)))

    def test_constant_raster(self):
        grid = RasterGrid(0.0, 0.0, 10.0, 4, 4, np.full(16, 7.0))
        self.assertEqual(block_mean_raster(grid, BlockSpec(GeoPoint(20, 20), 25.0, 10)), 7.0)

    def test_block_inside_one_cell(self):
        grid = RasterGrid(0.0, 0.0, 10.0, 2, 1, np.array([3.5, 9.0]))
        self.assertEqual(block_mean_raster(grid, BlockSpec(GeoPoint(5, 5), 4.0, 10)), 3.5)

    def test_block_straddling_two_cells(self):
        """Test an even lattice split evenly between values 1 and 3 averages to 2."""
        grid = RasterGrid(0.0, 0.0, 10.0, 2, 1, np.array([1.0, 3.0]))
        self.assertAlmostEqual(block_mean_raster(grid, BlockSpec(GeoPoint(10, 5), 4.0, 10)), 2.0, places=12)

    def test_nodata_lattice_points_skipped(self):
        grid = RasterGrid(0.0, 0.0, 10.0, 2, 1, np.array([-9999.0, 3.0]), nodata=-9999.0)
        self.assertEqual(block_mean_raster(grid, BlockSpec(GeoPoint(10, 5), 4.0, 10)), 3.0)

    def test_block_outside_raster(self):
        grid = RasterGrid(0.0, 0.0, 10.0, 2, 2, np.ones(4))
        with self.assertRaises(CoverageError) as context:
            block_mean_raster(grid, BlockSpec(GeoPoint(500, 500), 4.0, 10), covariate="elev", index=3)

        self.assertEqual(context.exception.covariate, "elev")
        self.assertEqual(context.exception.index, 3)


class TestRealignDataset(unittest.TestCase):
    """Test cases for realigning whole datasets."""

    def setUp(self):
        rng = np.random.default_rng(5)
        self.locations = [GeoPoint(float(e), float(n)) for e, n in rng.uniform(20, 80, (5, 2))]
        self.responses = tuple(ResponseObservation(p, 1.0 + i) for i, p in enumerate(self.locations))
        survey = rng.uniform(0, 100, (30, 2))
        self.plane = PointCovariate.from_samples("eca", _samples(survey, _plane), 1.0)
        self.wavy = PointCovariate.from_samples(
            "ndvi", _samples(survey, lambda e, n: np.sin(e / 15.0) * np.cos(n / 20.0)), 2.0)
        grid_values = np.arange(100, dtype=float).reshape(10, 10)
        self.raster = RasterCovariate("elevation", RasterGrid(0.0, 0.0, 10.0, 10, 10, grid_values), 7.0)

    def test_constant_raster_table(self):
        responses = self.responses[:2]
        constant = RasterCovariate("elev", RasterGrid(0.0, 0.0, 10.0, 10, 10, np.full(100, 7.0)))
        table = realign_dataset(Dataset(responses, raster_covariates=(constant,)), side=25.0, grid_n=10)

        self.assertEqual(table.shape, (2, 1))
        np.testing.assert_array_equal(table["elev"].to_numpy(), [7.0, 7.0])

    def test_plane_covariate_values(self):
        dataset = Dataset(self.responses, point_covariates=(self.plane,))
        table = realign_dataset(dataset, side=25.0, grid_n=20)
        expected = [_plane(p.easting, p.northing) for p in self.locations]
        np.testing.assert_allclose(table["eca"].to_numpy(), expected, atol=1e-7)

    def test_local_neighbourhood_fit(self):
        dataset = Dataset(self.responses, point_covariates=(self.plane,))
        config = RealignConfig(side=25.0, grid_n=10, neighbours=6)
        with self.assertLogs("src.realign.realign", level="WARNING") as logs:
            table = realign_at(dataset, self.locations, config)
        self.assertIn("local splines on 6 neighbours", logs.output[0])
        expected = [_plane(p.easting, p.northing) for p in self.locations]
        np.testing.assert_allclose(table["eca"].to_numpy(), expected, atol=1e-6)

    def test_mixed_dataset_matches_single_covariate_calls(self):
        """Test a 5 x 3 table equals per-covariate block means in manifest order."""
        dataset = Dataset(
            self.responses, point_covariates=(self.plane, self.wavy), raster_covariates=(self.raster,),
            covariate_order=("ndvi", "elevation", "eca"),
        )
        config = RealignConfig(side=25.0, grid_n=12)
        table = realign_at(dataset, self.locations, config)

        self.assertEqual(list(table.columns), ["ndvi", "elevation", "eca"])
        self.assertEqual(table.shape, (5, 3))
        wavy_model = tps_fit(self.wavy.samples)
        for i, location in enumerate(self.locations):
            block = BlockSpec(location, 25.0, 12)
            self.assertAlmostEqual(table["ndvi"][i], block_mean_point(wavy_model, block), places=10)
            self.assertAlmostEqual(table["elevation"][i], block_mean_raster(self.raster.grid, block), places=10)

    def test_threads_do_not_change_results(self):
        dataset = Dataset(self.responses, point_covariates=(self.plane, self.wavy),
                          raster_covariates=(self.raster,))
        config = RealignConfig(side=25.0, grid_n=10)
        one = realign_at(dataset, self.locations, config, threads=1)
        many = realign_at(dataset, self.locations, config, threads=3)
        np.testing.assert_array_equal(one.to_numpy(), many.to_numpy())

    def test_uncovered_location(self):
        far = GeoPoint(5000.0, 5000.0)
        dataset = Dataset(self.responses, raster_covariates=(self.raster,))

        with self.assertRaises(CoverageError):
            realign_at(dataset, [far], RealignConfig(grid_n=5))
        table = realign_at(dataset, [far, self.locations[0]], RealignConfig(grid_n=5), on_error="nan")
        self.assertTrue(np.isnan(table["elevation"][0]))
        self.assertFalse(np.isnan(table["elevation"][1]))


if __name__ == '__main__':
    unittest.main()
