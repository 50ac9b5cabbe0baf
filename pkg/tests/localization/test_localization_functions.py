# Standard Library Imports
import math
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.environment import SeededField, exponential, gaussian
from polylab.localization import (
    LocalizationObserver,
    apa_average,
    atom_set,
    atomic_mass,
    constant_schedule,
    decaying_schedule,
    density_average,
    geo_indicator,
    localization_series,
    localization_sufficient,
    localization_summary,
    schedule_from_config,
)
from polylab.localization.localization_functions import (
    SERIES_COLUMNS,
    _l1_ball_volume,
    _window_mass_1d,
)
from polylab.polymer import endpoint_distribution, iterate_polymer, run_replicas
from polylab.utils.polylab_exceptions import DomainError
from polylab.walk import srw


class TestAtoms(unittest.TestCase):
    def test_atom_set(self):
        f = {0: 0.6, 1: 0.3, 2: 0.1}
        self.assertEqual(atom_set(f, 0.2), {(0,), (1,)})
        self.assertTrue(np.isclose(atomic_mass(f, 0.2), 0.9))

    def test_strict_threshold(self):
        f = {x: 0.25 for x in range(4)}
        self.assertEqual(atom_set(f, 0.25), set())
        self.assertEqual(atomic_mass(f, 0.25), 0.0)

    def test_zero_threshold(self):
        f = {(0, 0): 0.5, (1, 2): 0.5}
        self.assertEqual(atom_set(f, 0.0), {(0, 0), (1, 2)})
        self.assertTrue(np.isclose(atomic_mass(f, 0.0), 1.0))

    def test_eps_check(self):
        with self.assertRaises(ValueError):
            atom_set({0: 1.0}, 1.0)
        with self.assertRaises(ValueError):
            atomic_mass({0: 1.0}, -0.1)

    def test_apa_average(self):
        series = [{0: 0.6, 1: 0.4}, {0: 1.0}, {0: 0.5, 1: 0.5}]
        self.assertTrue(np.isclose(apa_average(series, [0.5, 0.5, 0.5]), 1.6 / 3))
        with self.assertRaises(ValueError):
            apa_average([], [])
        with self.assertRaises(ValueError):
            apa_average(series, [0.5])


class TestGeoIndicator(unittest.TestCase):
    def test_spread_out(self):
        geo = geo_indicator({0: 0.5, 100: 0.5}, 0.4, 10)
        self.assertFalse(geo.flag)
        self.assertTrue(np.isclose(geo.window_mass, 0.5))
        self.assertTrue(geo.exact)

    def test_localized(self):
        geo = geo_indicator({0: 0.55, 1: 0.40, 50: 0.05}, 0.1, 1)
        self.assertTrue(geo.flag)
        self.assertTrue(np.isclose(geo.window_mass, 0.95))

    def test_diameter_zero(self):
        geo = geo_indicator({0: 0.55, 1: 0.45}, 0.5, 0)
        self.assertTrue(geo.flag)
        self.assertTrue(np.isclose(geo.window_mass, 0.55))

    def test_window_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            xs = np.sort(rng.choice(np.arange(-30, 30), size=8, replace=False))
            probs = rng.dirichlet(np.ones(8))
            K = int(rng.integers(0, 15))
            brute = max(probs[(xs >= a) & (xs <= a + K)].sum() for a in xs)
            shuffled = rng.permutation(8)
            self.assertTrue(
                np.isclose(_window_mass_1d(xs[shuffled], probs[shuffled], K), brute)
            )

    def test_two_dimensions(self):
        f = {(0, 0): 0.5, (1, 0): 0.3, (5, 5): 0.2}
        geo = geo_indicator(f, 0.3, 2)
        self.assertTrue(geo.flag)
        self.assertFalse(geo.exact)
        self.assertTrue(np.isclose(geo.window_mass, 0.8))
        spread = geo_indicator({(0, 0): 0.5, (10, 10): 0.5}, 0.4, 4)
        self.assertFalse(spread.flag)
        self.assertTrue(np.isclose(spread.window_mass, 0.5))

    def test_two_dimensions_early_exit(self):
        # Five sites of mass 1/400 cannot pass, the ball at the corner holds three
        f = {(x, y): 1.0 / 400 for x in range(20) for y in range(20)}
        geo = geo_indicator(f, 0.5, 2)
        self.assertFalse(geo.flag)
        self.assertTrue(np.isclose(geo.window_mass, 3.0 / 400))

    def test_ball_volume(self):
        self.assertEqual(_l1_ball_volume(1, 3), 7)
        self.assertEqual(_l1_ball_volume(2, 1), 5)
        self.assertEqual(_l1_ball_volume(2, 2), 13)
        self.assertEqual(_l1_ball_volume(3, 1), 7)

    def test_empty(self):
        geo = geo_indicator({}, 0.5, 3)
        self.assertFalse(geo.flag)
        self.assertEqual(geo.window_mass, 0.0)

    def test_errors(self):
        with self.assertRaises(ValueError):
            geo_indicator({0: 1.0}, 0.0, 2)
        with self.assertRaises(ValueError):
            geo_indicator({0: 1.0}, 0.5, -1)
        with self.assertRaises(ValueError):
            geo_indicator({0: 1.0}, 0.5, 1.5)

    def test_density_average(self):
        series = [{0: 1.0}, {0: 0.5, 100: 0.5}, {0: 0.9, 1: 0.1}, {0: 0.3, 9: 0.7}]
        self.assertTrue(np.isclose(density_average(series, 0.2, 2), 0.5))
        with self.assertRaises(ValueError):
            density_average([], 0.2, 2)


class TestSufficientCondition(unittest.TestCase):
    def test_exponential_fails(self):
        condition = localization_sufficient(0.5, exponential(1.0), srw(1))
        self.assertTrue(np.isclose(condition.lhs, 1.0 - math.log(2.0)))
        self.assertTrue(np.isclose(condition.rhs, math.log(2.0)))
        self.assertFalse(condition.holds)

    def test_gaussian_holds(self):
        condition = localization_sufficient(2.0, gaussian(), srw(1))
        self.assertTrue(np.isclose(condition.lhs, 2.0))
        self.assertTrue(condition.holds)

    def test_higher_entropy(self):
        # Gaussian lhs is beta^2/2, against log 4 for the planar walk
        self.assertFalse(localization_sufficient(1.5, gaussian(), srw(2)).holds)
        self.assertTrue(localization_sufficient(2.0, gaussian(), srw(2)).holds)

    def test_domain(self):
        with self.assertRaises(DomainError):
            localization_sufficient(1.0, exponential(1.0), srw(1))


class TestSchedules(unittest.TestCase):
    def test_constant(self):
        self.assertTrue(np.array_equal(constant_schedule(0.1, 3), [0.1, 0.1, 0.1]))
        with self.assertRaises(ValueError):
            constant_schedule(1.0, 3)

    def test_decaying(self):
        eps = decaying_schedule(100)
        self.assertTrue(np.isclose(eps[0], 1.0 / math.log(math.e + 1)))
        self.assertTrue(np.all(eps < 1.0))
        self.assertTrue(np.all(np.diff(eps) < 0))
        self.assertTrue(np.isclose(decaying_schedule(2, start=5)[1], 1.0 / math.log(math.e + 6)))
        with self.assertRaises(ValueError):
            decaying_schedule(3, start=0)

    def test_from_config(self):
        name, eps = schedule_from_config("decay", 4)
        self.assertEqual(name, "decay")
        self.assertTrue(np.array_equal(eps, decaying_schedule(4)))
        name, eps = schedule_from_config(0.1, 2)
        self.assertEqual(name, "eps=0.1")
        self.assertTrue(np.array_equal(eps, [0.1, 0.1]))
        for bad in ["fast", True, None]:
            with self.assertRaises(ValueError):
                schedule_from_config(bad, 2)


class TestSeries(unittest.TestCase):
    def test_series_and_summary(self):
        series = [{0: 1.0}, {-1: 0.5, 1: 0.5}, {-2: 0.25, 0: 0.5, 2: 0.25}]
        table = localization_series(series, [0.3, 0.3, 0.3], delta=0.2, K=2)
        self.assertEqual(list(table.columns), SERIES_COLUMNS)
        self.assertEqual(list(table["i"]), [1, 2, 3])
        self.assertTrue(np.allclose(table["atomic_mass"], [1.0, 1.0, 0.5]))
        self.assertTrue(np.allclose(table["max_atom"], [1.0, 0.5, 0.5]))
        self.assertEqual(list(table["geo_flag"]), [True, True, False])
        summary = localization_summary(table, 1.0, "eps=0.3", 0.2, 2)
        self.assertEqual(summary["n"], 3)
        self.assertTrue(np.isclose(summary["apa_avg"], 2.5 / 3))
        self.assertTrue(np.isclose(summary["geo_density"], 2.0 / 3))
        self.assertTrue(summary["geo_exact"])

    def test_start(self):
        table = localization_series([{0: 1.0}], [0.5], delta=0.5, K=0, start=7)
        self.assertEqual(table["i"].iloc[0], 7)
        with self.assertRaises(ValueError):
            localization_series([{0: 1.0}, {0: 1.0}], [0.5], delta=0.5, K=0)


class TestLocalizationObserver(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.schedules = {"decay": decaying_schedule(4), "eps=0.1": constant_schedule(0.1, 4)}
        cls.observer = LocalizationObserver(cls.schedules, delta=0.2, K=4)

    def test_records(self):
        field = SeededField(seed=3, law=gaussian())
        states = list(iterate_polymer(srw(1), field, 1.0, 4))
        records = self.observer(states[3])
        self.assertEqual([r["schedule"] for r in records], ["decay", "eps=0.1"])
        pmf = endpoint_distribution(states[3])
        for record, (name, eps) in zip(records, self.schedules.items()):
            self.assertEqual(record["i"], 3)
            self.assertEqual(record["eps_i"], eps[2])
            self.assertTrue(np.isclose(record["atomic_mass"], atomic_mass(pmf, eps[2])))
            self.assertTrue(np.isclose(record["max_atom"], pmf.probs.max()))

    def test_with_replicas(self):
        results = run_replicas(
            srw(1), gaussian(), 1.0, 4, num_seeds=2, observer=self.observer
        )
        observations = results.observations
        self.assertEqual(len(observations), 2 * 4 * 2)
        self.assertEqual(set(observations["schedule"]), {"decay", "eps=0.1"})
        self.assertEqual(sorted(set(observations["i"])), [1, 2, 3, 4])
        self.assertIn("seed", observations.columns)


if __name__ == "__main__":
    unittest.main()
