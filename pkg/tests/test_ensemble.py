#!/usr/bin/env python3
"""
Tests for splits, per-split selection, model averaging, ensemble summaries
and the configuration sweep.
"""

import os
import tempfile
import unittest
from dataclasses import replace
from itertools import combinations

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.data_model import RECOVERY_TERMS, recovery_design
from src.design import DesignMatrix, Standardization, TermMeta, evaluate_terms, mirror
from src.ensemble import (
    LASSO_LAR,
    SWEEP_COLUMNS,
    CvSettings,
    Ensemble,
    SelectorConfig,
    Split,
    SplitResult,
    candidate_trace,
    derive_seed,
    ensemble_weights,
    fit_covariate_model,
    fit_ensemble,
    generate_splits,
    model_averaged_predict,
    r_squared,
    run_split,
    selection_frequency,
    subset_size_histogram,
    sweep,
    vsepe_summary,
    write_ensemble_reports,
)
from src.errors import ConfigError, DegenerateWeightError, PreconditionError
from src.lar import FittedModel, predict


def _member(intercept=0.0, labels=(), sse=1.0, split_id=0):
    terms = tuple(range(len(labels)))
    model = FittedModel(terms, np.ones(len(labels)), intercept, Standardization.identity(len(labels)), tuple(labels))
    return SplitResult(Split((0, 1), (2,)), model, np.array([0.0]), sse, 0, 0.0, split_id)


def _design(n, p, seed):
    rng = np.random.default_rng(seed)
    terms = tuple(TermMeta("linear", f"x{j}") for j in range(p))
    return DesignMatrix(terms, rng.normal(2.0, 1.5, size=(n, p))), rng


class TestSplits(unittest.TestCase):
    """Test cases for split generation and seed derivation."""

    def test_exhaustive_small_space(self):
        """Test n = 4, train_size = 2, m = 6 yields every split exactly once."""
        splits = generate_splits(4, 2, 6, seed=1)
        self.assertEqual(sorted(s.train_idx for s in splits), list(combinations(range(4), 2)))
        for split in splits:
            self.assertEqual(sorted(split.train_idx + split.valid_idx), [0, 1, 2, 3])

    def test_same_seed_same_splits(self):
        self.assertEqual(generate_splits(60, 35, 50, seed=9), generate_splits(60, 35, 50, seed=9))
        self.assertNotEqual(generate_splits(60, 35, 50, seed=9), generate_splits(60, 35, 50, seed=10))

    def test_five_hundred_distinct(self):
        splits = generate_splits(60, 35, 500, seed=0)
        self.assertEqual(len({s.train_idx for s in splits}), 500)
        self.assertTrue(all(len(s.valid_idx) == 25 for s in splits))

    def test_too_many_splits(self):
        with self.assertRaises(PreconditionError):
            generate_splits(4, 2, 7, seed=0)

    def test_train_size_range(self):
        for bad in (1, 10, 11):
            with self.assertRaises(PreconditionError):
                generate_splits(10, bad, 1, seed=0)

    def test_derived_seeds(self):
        self.assertEqual(derive_seed(42, "splits"), derive_seed(42, "splits"))
        self.assertNotEqual(derive_seed(42, "splits"), derive_seed(42, "mccm"))
        self.assertNotEqual(derive_seed(42, "splits"), derive_seed(43, "splits"))


class TestWeights(unittest.TestCase):
    """Test cases for inverse-SSE weights."""

    def test_worked_cases(self):
        np.testing.assert_allclose(ensemble_weights([1.0, 3.0]), [0.75, 0.25], atol=1e-15)
        np.testing.assert_allclose(ensemble_weights([1.0, 2.0, 4.0]), [4 / 7, 2 / 7, 1 / 7], atol=1e-15)

    def test_equal_sse_uniform(self):
        np.testing.assert_allclose(ensemble_weights([2.5] * 8), np.full(8, 1 / 8), atol=1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(1e-6, 1e6), min_size=1, max_size=40), st.floats(1e-3, 1e3))
    def test_sum_to_one_and_scale_invariant(self, sse, scale):
        weights = ensemble_weights(sse)
        self.assertAlmostEqual(weights.sum(), 1.0, delta=1e-12)
        np.testing.assert_allclose(ensemble_weights([s * scale for s in sse]), weights, rtol=1e-9, atol=1e-15)

    def test_zero_sse_needs_floor(self):
        with self.assertRaises(DegenerateWeightError):
            ensemble_weights([0.0, 1.0])
        weights = ensemble_weights([0.0, 1.0], sse_floor=1e-12)
        self.assertAlmostEqual(weights[0], 1.0, places=9)

    def test_split_results_accepted(self):
        np.testing.assert_allclose(ensemble_weights([_member(sse=1.0), _member(sse=3.0)]), [0.75, 0.25])


class TestEnsembleSummaries(unittest.TestCase):
    """Test cases for averaging, error summaries and frequencies."""

    def test_constant_members_average(self):
        ens = Ensemble((_member(0.0), _member(1.0)), np.array([0.75, 0.25]))
        np.testing.assert_allclose(model_averaged_predict(ens, np.zeros((5, 1))), np.full(5, 0.25))

    def test_identical_members(self):
        design, rng = _design(30, 4, 0)
        y = design.values @ np.array([1.0, 0.0, -1.0, 0.5]) + rng.normal(size=30)
        result = run_split(design, y, Split.from_train(tuple(range(20)), 30))
        ens = Ensemble((result, result, result), np.array([0.2, 0.3, 0.5]), design.columns)
        np.testing.assert_allclose(model_averaged_predict(ens, design.values),
                                   predict(result.model, design.values), atol=1e-12)

    def test_weighted_sum_oracle(self):
        design, rng = _design(30, 5, 1)
        y = design.values @ rng.normal(size=5) + rng.normal(size=30)
        splits = generate_splits(30, 20, 3, seed=4)
        ens = fit_ensemble(design, y, splits, CvSettings(train_size=20, n_splits=3))

        expected = np.zeros(30)
        for weight, result in zip(ens.weights, ens.results):
            model = result.model
            rows = design.values[:, list(model.terms)]
            member = model.intercept + (mirror(rows, model.standardization) @ model.coefficients
                                        if model.terms else 0.0)
            expected += weight * member
        np.testing.assert_allclose(model_averaged_predict(ens, design.values), expected, atol=1e-12)

    def test_vsepe_summary(self):
        summary = vsepe_summary([-1.0, 2.0, -3.0, 4.0])
        self.assertEqual(summary["min"], 1.0)
        self.assertEqual(summary["max"], 4.0)
        self.assertEqual(summary["median"], 2.5)
        self.assertEqual(summary["mean"], 2.5)
        self.assertEqual(summary["q1"], 1.75)
        self.assertEqual(summary["q3"], 3.25)

    def test_vsepe_single_error(self):
        self.assertEqual(set(vsepe_summary([0.5]).values()), {0.5})

    def test_r_squared(self):
        obs = np.array([0.0, 1.0, 2.0])
        self.assertEqual(r_squared(obs, obs), 1.0)
        self.assertEqual(r_squared(obs, np.full(3, 1.0)), 0.0)
        self.assertEqual(r_squared(obs, np.array([0.0, 1.0, 1.0])), 0.5)
        with self.assertRaises(PreconditionError):
            r_squared(np.ones(3), np.zeros(3))

    def test_selection_frequency(self):
        columns = (TermMeta("linear", "A"), TermMeta("linear", "B"), TermMeta("linear", "C"))
        members = (_member(labels=("A",)), _member(labels=("A", "B")), _member(labels=("B",)))
        ens = Ensemble(members, np.full(3, 1 / 3), columns)

        frame = selection_frequency(ens)
        self.assertEqual(list(zip(frame["term"], frame["count"])), [("A", 2), ("B", 2)])
        with_zeros = selection_frequency(ens, include_zeros=True, correlated={"A": ["A^2", "D"]})
        self.assertEqual(with_zeros["term"].tolist(), ["A", "B", "C"])
        self.assertEqual(with_zeros["count"].tolist(), [2, 2, 0])
        self.assertEqual(with_zeros["correlated_terms"].tolist(), ["A^2;D", "", ""])

    def test_term_in_every_member(self):
        ens = Ensemble(tuple(_member(labels=("A",)) for _ in range(4)), np.full(4, 0.25),
                       (TermMeta("linear", "A"),))
        self.assertEqual(selection_frequency(ens)["count"].tolist(), [4])

    def test_size_histogram(self):
        ens = Ensemble(tuple(_member() for _ in range(3)), np.full(3, 1 / 3))
        self.assertEqual(subset_size_histogram(ens), {0: 3})
        sized = Ensemble((_member(labels=("A",)), _member(labels=("B",)), _member(labels=("A", "B", "C"))),
                         np.full(3, 1 / 3))
        self.assertEqual(subset_size_histogram(sized), {1: 2, 3: 1})


class TestRunSplit(unittest.TestCase):
    """Test cases for selecting one split's model by validation SSE."""

    def setUp(self):
        self.design, self.rng = _design(30, 6, 2)
        self.split = Split.from_train(tuple(range(0, 30, 3)) + tuple(range(1, 30, 3)), 30)

    def test_exact_term_recovered_by_every_selector(self):
        y = 1.0 + 2.0 * self.design.values[:, 3]
        for selector in ("lasso_lar", "lar", "exhaustive", "forward", "backward", "seqrep"):
            result = run_split(self.design, y, self.split, selector)
            self.assertIn(3, result.model.terms, msg=selector)
            self.assertLess(result.sse, 1e-18, msg=selector)

    def test_noise_choice_not_worse_than_intercept(self):
        y = self.rng.normal(size=30)
        result = run_split(self.design, y, self.split, LASSO_LAR)
        train, valid = list(self.split.train_idx), list(self.split.valid_idx)
        intercept_sse = float(((y[valid] - y[train].mean()) ** 2).sum())
        self.assertLessEqual(result.sse, intercept_sse + 1e-12)
        np.testing.assert_allclose(result.vsepe @ result.vsepe, result.sse)

    def test_constant_training_column_dropped(self):
        values = self.design.values.copy()
        values[list(self.split.train_idx), 0] = 4.0
        design = DesignMatrix(self.design.columns, values)
        y = self.design.values[:, 2] + 0.1 * self.rng.normal(size=30)
        result = run_split(design, y, self.split)

        self.assertEqual(result.dropped_constant, ("x0",))
        self.assertNotIn(0, result.model.terms)

    def test_constant_training_column_warned(self):
        values = self.design.values.copy()
        values[list(self.split.train_idx), 1] = -2.0
        design = DesignMatrix(self.design.columns, values)
        with self.assertLogs("src.ensemble.selection", level="WARNING") as logs:
            run_split(design, self.design.values[:, 2], self.split, split_id=4)
        self.assertIn("Split 4: dropping 1 columns", logs.output[0])

    def test_candidate_trace_path(self):
        y = 1.0 + 2.0 * self.design.values[:, 3]
        trace = candidate_trace(self.design, y, self.split, LASSO_LAR)

        self.assertEqual(list(trace.columns), ["step", "action", "active_size", "max_abs_corr"])
        self.assertEqual(trace["action"][0], "init")
        self.assertEqual(trace["action"][1], "add(3)")

    def test_candidate_trace_sequence(self):
        y = 1.0 + 2.0 * self.design.values[:, 3]
        trace = candidate_trace(self.design, y, self.split, "forward")

        self.assertEqual(list(trace.columns), ["size", "terms", "rss"])
        self.assertEqual(trace.loc[trace["size"] == 1, "terms"].iloc[0], "x3")
        with self.assertRaises(PreconditionError):
            candidate_trace(self.design, y, self.split, "ridge")

    def test_max_subset_size(self):
        y = self.design.values @ np.arange(6.0)
        result = run_split(self.design, y, self.split, "forward", SelectorConfig(max_subset_size=2))
        self.assertLessEqual(result.chosen_size, 2)


class TestPipelineAndSweep(unittest.TestCase):
    """Test cases for the covariate pipeline and the sweep grid."""

    def setUp(self):
        rng = np.random.default_rng(21)
        self.table = pd.DataFrame(rng.normal(size=(30, 3)), columns=["ECA", "NDVI", "elev"])
        self.y = 1.0 + self.table["ECA"] - 0.5 * self.table["NDVI"] ** 2 + 0.2 * rng.normal(size=30)
        self.settings = CvSettings(train_size=20, n_splits=8)

    def test_sweep_grid_rows(self):
        """Test a 3 x 4 configuration grid gives 12 rows in grid order."""
        configs = [(t, m) for t in (15, 20, 25) for m in (0.95, 0.8, 0.6, 0.4)]
        frame = sweep(self.table, self.y, configs, self.settings, seed=3, max_order=2)

        self.assertEqual(list(frame.columns), SWEEP_COLUMNS)
        self.assertEqual(len(frame), 12)
        self.assertEqual(list(zip(frame["train_size"], frame["mccm"])), configs)
        self.assertTrue((frame["min"] <= frame["median"]).all())

    def test_sweep_error_names_configuration(self):
        forward = replace(self.settings, selector="forward")
        with self.assertRaises(ConfigError) as context:
            sweep(self.table, self.y, [(20, 0.95)], forward, seed=3, max_order=2)
        self.assertIn("[train_size=20, mccm=0.95]", context.exception.message)

    def test_threads_do_not_change_results(self):
        one = fit_covariate_model(self.table, self.y, self.settings, seed=5, max_order=2)
        many = fit_covariate_model(self.table, self.y, replace(self.settings, threads=4), seed=5, max_order=2)

        np.testing.assert_array_equal(one.ensemble.weights, many.ensemble.weights)
        np.testing.assert_array_equal(one.fitted, many.fitted)
        self.assertEqual([r.model.terms for r in one.ensemble.results],
                         [r.model.terms for r in many.ensemble.results])

    def test_reports_written(self):
        fit = fit_covariate_model(self.table, self.y, self.settings, seed=5, max_order=2)
        with tempfile.TemporaryDirectory() as tmp:
            paths = write_ensemble_reports(fit.ensemble, tmp, fit.mccm, fit.r2)
            self.assertEqual(set(paths), {"ensemble_report", "selection_frequency", "subset_sizes", "vsepe_summary"})
            report = pd.read_csv(paths["ensemble_report"])
            self.assertEqual(len(report), 8)
            self.assertAlmostEqual(report["weight"].sum(), 1.0, places=12)
            self.assertTrue(os.path.exists(paths["vsepe_summary"]))


@pytest.mark.slow
class TestSyntheticRecovery(unittest.TestCase):
    """Monte-Carlo checks on the three-term synthetic response."""

    def test_true_terms_rank_high(self):
        """Test the true terms are in the top 5 frequencies and MAP R-squared on held-out truth >= 0.6."""
        hits = 0
        for replicate in range(20):
            X, y, _ = recovery_design(seed=replicate)
            fit = fit_covariate_model(X, y, CvSettings(threads=4), seed=replicate)
            top = selection_frequency(fit.ensemble)["term"].tolist()[:5]
            if set(RECOVERY_TERMS) <= set(top):
                hits += 1

            X_test, _, truth = recovery_design(n=200, seed=10_000 + replicate)
            prediction = model_averaged_predict(fit.ensemble, evaluate_terms(X_test, fit.design.columns))
            self.assertGreaterEqual(r_squared(truth, prediction), 0.6, msg=f"replicate {replicate}")
        self.assertGreaterEqual(hits, 18)

    def test_larger_training_sets_fit_better(self):
        wins = 0
        for replicate in range(20):
            X, y, _ = recovery_design(seed=500 + replicate)
            small = fit_covariate_model(X, y, CvSettings(train_size=35, n_splits=100, threads=4), seed=replicate)
            large = fit_covariate_model(X, y, CvSettings(train_size=55, n_splits=100, threads=4), seed=replicate)
            wins += large.r2 >= small.r2
        self.assertGreaterEqual(wins, 15)


if __name__ == '__main__':
    unittest.main()
