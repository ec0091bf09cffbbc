#!/usr/bin/env python3
"""
Tests for the LAR / LAR-LASSO path.

Knot coefficients are checked against the LASSO optimality conditions, a
coordinate-descent LASSO, the soft-threshold closed form on orthonormal
designs and ordinary least squares at the end of the path.
"""

import unittest
import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import Lasso

from src.design import DesignMatrix, TermMeta, standardize
from src.errors import PreconditionError
from src.lar import LAR, LASSO, lar_path, model_at, path_frame, predict


def _standardized(rng, n, p):
    X = rng.normal(size=(n, p))
    X -= X.mean(axis=0)
    return X / np.linalg.norm(X, axis=0)


def _instance(seed, n_range=(15, 40), p_range=(2, 30)):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    p = int(rng.integers(p_range[0], p_range[1] + 1))
    X = _standardized(rng, n, p)
    beta = np.zeros(p)
    support = rng.choice(p, size=min(p, 3), replace=False)
    beta[support] = rng.normal(0, 3, size=support.size)
    y = 1.5 + X @ beta + 0.3 * rng.normal(size=n)
    return X, y


class TestLarPathOptimality(unittest.TestCase):
    """Test cases checking knot coefficients against LASSO solutions."""

    def test_knots_satisfy_lasso_conditions(self):
        """Test every knot of 100 random instances (p > n included) solves the LASSO at its penalty."""
        for seed in range(100):
            X, y = _instance(seed)
            path = lar_path(X, y, LASSO)
            target = y - y.mean()
            for step in path.steps:
                lam = step.max_abs_corr
                corr = X.T @ (target - X @ step.coefficients)
                nonzero = step.coefficients != 0
                np.testing.assert_allclose(
                    corr[nonzero], lam * np.sign(step.coefficients[nonzero]), atol=1e-7,
                    err_msg=f"seed {seed}, step {step.action_label}",
                )
                self.assertLessEqual(np.abs(corr).max(), lam + 1e-7, msg=f"seed {seed}")

    def test_matches_coordinate_descent(self):
        """Test knot coefficients equal an independent coordinate-descent LASSO."""
        for seed in range(30):
            X, y = _instance(1000 + seed, n_range=(25, 40), p_range=(2, 10))
            n = X.shape[0]
            path = lar_path(X, y, LASSO)
            C0 = path.steps[0].max_abs_corr
            for step in path.steps[1:]:
                lam = step.max_abs_corr
                if lam < 1e-3 * C0:
                    continue
                oracle = Lasso(alpha=lam / n, fit_intercept=False, tol=1e-14, max_iter=200_000)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ConvergenceWarning)
                    oracle.fit(X, y - y.mean())
                np.testing.assert_allclose(step.coefficients, oracle.coef_, atol=1e-6,
                                           err_msg=f"seed {seed}, lambda {lam}")

    def test_orthonormal_soft_threshold(self):
        """Test knots on orthonormal designs equal soft-thresholded OLS coefficients."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            raw = rng.normal(size=(10, 5))
            Q, _ = np.linalg.qr(raw - raw.mean(axis=0))
            y = rng.normal(size=10) * 3.0
            z = Q.T @ (y - y.mean())
            path = lar_path(Q, y, LASSO)

            self.assertEqual(len(path.steps), 6)
            for step in path.steps:
                lam = step.max_abs_corr
                expected = np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)
                np.testing.assert_allclose(step.coefficients, expected, atol=1e-8)

    def test_final_step_is_ols(self):
        """Test the last knot equals OLS on all columns when p < n."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            X = _standardized(rng, 30, 8)
            y = rng.normal(size=30) + X @ rng.normal(size=8)
            for variant in (LAR, LASSO):
                path = lar_path(X, y, variant, corr_tol=0.0)
                ols, *_ = np.linalg.lstsq(X, y - y.mean(), rcond=None)

                self.assertEqual(path.stop_reason, "df_exhausted")
                np.testing.assert_allclose(path.steps[-1].coefficients, ols, atol=1e-8)


class TestLarPathStructure(unittest.TestCase):
    """Test cases for path bookkeeping and stopping rules."""

    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.X = _standardized(self.rng, 25, 6)
        self.y = self.X @ np.array([3.0, 0.0, -2.0, 0.0, 1.0, 0.0]) + 0.5 * self.rng.normal(size=25)

    def test_single_column(self):
        """Test p = 1 gives the empty model then the OLS coefficient."""
        X = self.X[:, :1]
        path = lar_path(X, self.y)

        self.assertEqual(len(path.steps), 2)
        self.assertEqual(path.steps[0].active, ())
        self.assertEqual(path.steps[1].active, (0,))
        self.assertAlmostEqual(path.steps[1].coefficients[0], float(X[:, 0] @ (self.y - self.y.mean())), places=12)

    def test_lar_adds_one_column_per_step(self):
        path = lar_path(self.X, self.y, LAR)
        sizes = [len(s.active) for s in path.steps]
        self.assertEqual(sizes, list(range(len(sizes))))
        self.assertTrue(all(s.action == "add" for s in path.steps[1:]))

    def test_correlation_non_increasing(self):
        path = lar_path(self.X, self.y, LASSO)
        corrs = [s.max_abs_corr for s in path.steps]
        self.assertTrue(all(b <= a + 1e-12 for a, b in zip(corrs, corrs[1:])))
        self.assertEqual(path.intercept, self.y.mean())

    def test_corr_tol_stops_early(self):
        full = lar_path(self.X, self.y)
        C0 = full.steps[0].max_abs_corr
        short = lar_path(self.X, self.y, corr_tol=0.5 * C0)

        self.assertEqual(short.stop_reason, "corr_tol")
        self.assertLess(len(short.steps), len(full.steps))
        self.assertLessEqual(short.steps[-1].max_abs_corr, 0.5 * C0)

    def test_max_steps(self):
        path = lar_path(self.X, self.y, max_steps=2)
        self.assertEqual(len(path.steps), 3)
        self.assertEqual(path.stop_reason, "max_steps")

    def test_p_greater_than_n_caps_active_set(self):
        X = _standardized(self.rng, 10, 25)
        y = self.rng.normal(size=10)
        path = lar_path(X, y, LAR)
        self.assertLessEqual(max(len(s.active) for s in path.steps), 9)

    def test_duplicate_columns_never_both_active(self):
        X = np.column_stack([self.X[:, 0], self.X[:, 0], self.X[:, 1:]])
        path = lar_path(X, self.y, LASSO)
        for step in path.steps:
            self.assertFalse({0, 1} <= set(step.active))
            self.assertTrue(np.all(np.isfinite(step.coefficients)))

    def test_unstandardized_input_rejected(self):
        with self.assertRaises(PreconditionError):
            lar_path(self.X * 2.0 + 1.0, self.y)

    def test_path_frame(self):
        path = lar_path(self.X, self.y, LAR)
        frame = path_frame(path)

        self.assertEqual(list(frame.columns), ["step", "action", "active_size", "max_abs_corr"])
        self.assertEqual(frame["action"][0], "init")
        self.assertTrue(frame["action"][1].startswith("add("))


class TestModelAt(unittest.TestCase):
    """Test cases for turning knots into fitted models."""

    def setUp(self):
        rng = np.random.default_rng(9)
        self.raw = rng.normal(5.0, 2.0, size=(20, 4))
        self.y = self.raw @ np.array([1.0, -0.5, 0.0, 2.0]) + rng.normal(size=20)
        terms = tuple(TermMeta("linear", f"x{j}") for j in range(4))
        self.std, self.stats = standardize(DesignMatrix(terms, self.raw))
        self.path = lar_path(self.std.values, self.y)

    def test_step_zero_is_intercept_only(self):
        model = model_at(self.path, 0, self.stats, self.std.labels)

        self.assertEqual(model.size, 0)
        np.testing.assert_allclose(predict(model, self.raw), np.full(20, self.y.mean()))

    def test_training_predictions_match_path_residuals(self):
        for k in range(len(self.path.steps)):
            model = model_at(self.path, k, self.stats, self.std.labels)
            fitted = predict(model, self.raw)
            expected = self.path.intercept + self.std.values @ self.path.steps[k].coefficients
            np.testing.assert_allclose(fitted, expected, atol=1e-10)

    def test_final_model_is_raw_ols(self):
        model = model_at(self.path, len(self.path.steps) - 1, self.stats, self.std.labels)
        A = np.column_stack([np.ones(20), self.raw])
        coef, *_ = np.linalg.lstsq(A, self.y, rcond=None)
        np.testing.assert_allclose(predict(model, self.raw), A @ coef, atol=1e-8)

    def test_labelled_frame_prediction(self):
        model = model_at(self.path, 2, self.stats, self.std.labels)
        frame = self.std.to_frame()
        frame[:] = self.raw
        np.testing.assert_allclose(predict(model, frame), predict(model, self.raw))

    def test_out_of_range_step(self):
        with self.assertRaises(PreconditionError):
            model_at(self.path, len(self.path.steps))


if __name__ == '__main__':
    unittest.main()
