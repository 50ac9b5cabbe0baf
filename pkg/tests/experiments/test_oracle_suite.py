# Standard Library Imports
import math
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.environment import beta_max
from polylab.experiments import CHECK_NAMES, run_oracle_suite
from polylab.experiments.oracle_suite import (
    FAIL,
    PASS,
    SKIPPED,
    random_case,
    random_pspm,
)


class TestOracleSuite(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.results = {r.check: r for r in run_oracle_suite(cases=6, max_n=4, seed=2)}

    def test_all_pass(self):
        self.assertEqual(list(self.results), list(CHECK_NAMES))
        for name, result in self.results.items():
            self.assertEqual(result.status, PASS, msg=f"{name}: {result}")
            self.assertEqual(result.cases, 6)
            self.assertGreaterEqual(result.residual, 0.0)

    def test_corrupted_checks_fail(self):
        for name in ["path_sum", "endpoint_pmf", "chain_dp"]:
            with self.subTest(check=name):
                (result,) = run_oracle_suite(
                    cases=6, max_n=4, seed=2, corrupt=name, checks=[name]
                )
                self.assertEqual(result.status, FAIL)
                self.assertGreater(result.residual, 1e-10)

    def test_guard_skips(self):
        results = run_oracle_suite(
            cases=3, max_n=3, max_paths=1, checks=["path_sum", "endpoint_pmf", "chain_dp"]
        )
        path_sum, endpoint_pmf, chain_dp = results
        for result in (path_sum, endpoint_pmf):
            self.assertEqual(result.status, SKIPPED)
            self.assertEqual(result.cases, 0)
            self.assertTrue(math.isnan(result.residual))
        self.assertEqual(chain_dp.status, PASS)

    def test_errors(self):
        with self.assertRaises(ValueError):
            run_oracle_suite(cases=1, corrupt="metric_orbit")
        with self.assertRaises(ValueError):
            run_oracle_suite(cases=1, checks=["unknown"])
        with self.assertRaises(ValueError):
            run_oracle_suite(cases=0)


class TestRandomInstances(unittest.TestCase):
    def test_random_case(self):
        for index in range(30):
            case = random_case(5, index, max_n=6)
            again = random_case(5, index, max_n=6)
            self.assertEqual((case.law, case.beta, case.n, case.seed), again[1:])
            self.assertTrue(1 <= case.n <= 6)
            self.assertTrue(0.0 < case.beta <= 0.8 * beta_max(case.law))
            self.assertLessEqual(len(case.walk.probs), 4)
            self.assertTrue(np.isclose(case.walk.probs.sum(), 1.0))

    def test_random_pspm(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            f = random_pspm(rng, max_atoms=5, max_levels=3)
            self.assertLessEqual(len(f), 5)
            self.assertLessEqual(f.norm, 1.0)
            self.assertTrue(all(1 <= lv <= 3 for lv in f.level_set()))


if __name__ == "__main__":
    unittest.main()
