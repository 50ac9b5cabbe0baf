# Standard Library Imports
import os
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.environment import bernoulli, gaussian, log_mgf, mean_eta
from polylab.polymer import (
    annealed_ratio,
    endpoint_distribution,
    run_replicas,
    scan_replicas,
    summarize_series,
)
from polylab.polymer.replicas import SERIES_COLUMNS
from polylab.utils.polylab_exceptions import DomainError
from polylab.walk import srw

SLOW_TESTS = os.environ.get("POLYLAB_SLOW_TESTS")


def max_mass_observer(state):
    return {"n": state.n, "max_mass": float(endpoint_distribution(state).probs.max())}


def two_record_observer(state):
    return [{"n": state.n, "tag": "a"}, {"n": state.n, "tag": "b"}]


class TestRunReplicas(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.walk = srw(1)
        cls.law = gaussian()
        cls.results = run_replicas(cls.walk, cls.law, 0.5, 16, num_seeds=4, base_seed=3)

    def test_series_shape(self):
        series = self.results.series
        self.assertEqual(list(series.columns), SERIES_COLUMNS)
        self.assertEqual(len(series), 4 * 5)
        self.assertEqual(sorted(series["n"].unique().tolist()), [1, 2, 4, 8, 16])
        self.assertEqual(series["seed"].nunique(), 4)
        self.assertTrue(np.allclose(series["F_n"], series["logZ"] / series["n"]))

    def test_summary(self):
        summary = self.results.summary
        self.assertEqual(summary["n"], 16)
        self.assertEqual(summary["lambda"], log_mgf(self.law, 0.5))
        self.assertTrue(np.isclose(summary["gap"], summary["lambda"] - summary["mean_F"]))
        self.assertGreater(summary["se_F"], 0.0)
        self.assertIsNone(self.results.observations)

    def test_reproducible(self):
        again = run_replicas(self.walk, self.law, 0.5, 16, num_seeds=4, base_seed=3)
        self.assertTrue(
            np.array_equal(again.series["logZ"].values, self.results.series["logZ"].values)
        )

    def test_parallel_matches_serial(self):
        parallel = run_replicas(
            self.walk, self.law, 0.5, 16, num_seeds=4, base_seed=3, processes=2
        )
        self.assertTrue(
            np.array_equal(
                parallel.series["logZ"].values, self.results.series["logZ"].values
            )
        )

    def test_observer(self):
        results = run_replicas(
            self.walk, self.law, 0.5, 6, num_seeds=2, observer=max_mass_observer
        )
        observations = results.observations
        self.assertEqual(len(observations), 2 * 6)
        self.assertIn("seed", observations.columns)
        self.assertTrue(np.all(observations["max_mass"] <= 1.0))

    def test_observer_lists(self):
        results = run_replicas(
            self.walk, self.law, 0.5, 3, num_seeds=1, observer=two_record_observer
        )
        self.assertEqual(results.observations["tag"].tolist(), ["a", "b"] * 3)

    def test_errors(self):
        with self.assertRaises(ValueError):
            run_replicas(self.walk, self.law, 0.5, 0, num_seeds=2)
        with self.assertRaises(ValueError):
            run_replicas(self.walk, self.law, 0.5, 4, num_seeds=0)
        with self.assertRaises(DomainError):
            run_replicas(self.walk, self.law, -0.5, 4, num_seeds=2)

    def test_small_beta(self):
        results = run_replicas(self.walk, self.law, 1e-14, 8, num_seeds=3)
        self.assertTrue(np.all(np.abs(results.series["F_n"]) < 1e-12))


class TestScanReplicas(unittest.TestCase):
    def test_table(self):
        law = bernoulli()
        series, table = scan_replicas(srw(1), law, [0.6, 0.2], 8, num_seeds=3)
        self.assertEqual(table["beta"].tolist(), [0.2, 0.6])
        self.assertEqual(len(series), 2 * 3 * 4)
        self.assertTrue(np.allclose(table["lower_bound"], table["beta"] * mean_eta(law)))
        for _, row in table.iterrows():
            self.assertTrue(np.isclose(row["lambda"], log_mgf(law, row["beta"])))

    def test_same_environments(self):
        # The seeds are shared across the grid
        series, _ = scan_replicas(srw(1), gaussian(), [0.3, 0.9], 4, num_seeds=2)
        seeds = series.groupby("beta")["seed"].apply(lambda s: sorted(set(s)))
        self.assertEqual(seeds.iloc[0], seeds.iloc[1])


class TestSummarizeSeries(unittest.TestCase):
    def test_single_seed(self):
        results = run_replicas(srw(1), gaussian(), 0.5, 4, num_seeds=1)
        summary = summarize_series(results.series, gaussian(), 0.5)
        self.assertEqual(summary["se_F"], 0.0)


class TestAnnealedRatio(unittest.TestCase):
    def test_shape(self):
        ratios = annealed_ratio(srw(1), bernoulli(), 0.5, 3, num_seeds=20)
        self.assertEqual(ratios.shape, (20,))
        self.assertTrue(np.all(ratios > 0.0))

    @unittest.skipUnless(SLOW_TESTS, "Set POLYLAB_SLOW_TESTS to run")
    def test_mean_is_one(self):
        ratios = annealed_ratio(srw(1), bernoulli(), 0.5, 4, num_seeds=10_000)
        se = ratios.std(ddof=1) / np.sqrt(len(ratios))
        self.assertLess(abs(ratios.mean() - 1.0), 3 * se)


@unittest.skipUnless(SLOW_TESTS, "Set POLYLAB_SLOW_TESTS to run")
class TestFreeEnergyBounds(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.law = gaussian()
        cls.beta = 0.8
        cls.results = run_replicas(srw(1), cls.law, cls.beta, 128, num_seeds=200)

    def test_annealed_upper_bound(self):
        summary = self.results.summary
        self.assertLessEqual(summary["mean_F"], summary["lambda"] + 3 * summary["se_F"])

    def test_mean_lower_bound(self):
        summary = self.results.summary
        self.assertGreaterEqual(
            summary["mean_F"], self.beta * mean_eta(self.law) - 3 * summary["se_F"]
        )

    def test_superadditive_means(self):
        means = self.results.series.groupby("n")["F_n"].agg(["mean", "sem"])
        increments = means["mean"].diff().dropna()
        slack = 3 * np.sqrt(means["sem"] ** 2 + means["sem"].shift() ** 2).dropna()
        self.assertTrue(np.all(increments.values > -slack.values))


if __name__ == "__main__":
    unittest.main()
