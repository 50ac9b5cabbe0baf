# Standard Library Imports
import itertools
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.pspm import (
    EmpiricalMeasure,
    Pspm,
    d_alpha_exact,
    d_alpha_upper,
    distance,
    distance_matrix,
    embed,
    translate,
    wasserstein,
)
from polylab.utils.polylab_exceptions import EnumerationSizeError


def random_pspm(rng, max_atoms=4):
    size = int(rng.integers(0, max_atoms + 1))
    points = set()
    while len(points) < size:
        points.add((int(rng.integers(1, 3)), int(rng.integers(-3, 4))))
    masses = rng.dirichlet(np.ones(max(size, 1)))[:size] * rng.uniform(0.3, 1.0)
    return Pspm.from_atoms([(lv, x, m) for (lv, x), m in zip(sorted(points), masses)])


class TestDistance(unittest.TestCase):
    def test_modes(self):
        rng = np.random.default_rng(1)
        f, g = random_pspm(rng), random_pspm(rng)
        self.assertEqual(distance(f, g, 2.0, exact=True), d_alpha_exact(f, g, 2.0))
        self.assertEqual(distance(f, g, 2.0, exact=False), d_alpha_upper(f, g, 2.0))
        self.assertEqual(distance(f, g, 2.0), d_alpha_exact(f, g, 2.0))

    def test_auto_switches_to_upper(self):
        f = embed({x: 0.05 for x in range(20)})
        self.assertEqual(distance(f, Pspm.zero(), 2.0), d_alpha_upper(f, Pspm.zero(), 2.0))

    def test_matrix(self):
        rng = np.random.default_rng(2)
        atoms_a = [random_pspm(rng) for _ in range(3)]
        atoms_b = [random_pspm(rng) for _ in range(2)]
        matrix = distance_matrix(atoms_a, atoms_b, 2.0)
        self.assertEqual(matrix.shape, (3, 2))
        for i, j in itertools.product(range(3), range(2)):
            self.assertEqual(matrix[i, j], distance(atoms_a[i], atoms_b[j], 2.0))
        parallel = distance_matrix(atoms_a, atoms_b, 2.0, processes=2)
        self.assertTrue(np.array_equal(parallel, matrix))


class TestWasserstein(unittest.TestCase):
    def test_matches_permutation_search(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            mu = EmpiricalMeasure([random_pspm(rng) for _ in range(3)])
            nu = EmpiricalMeasure([random_pspm(rng) for _ in range(3)])
            cost = distance_matrix(mu.atoms, nu.atoms, 2.0, exact=True)
            brute = min(
                sum(cost[i, p[i]] for i in range(3)) / 3.0
                for p in itertools.permutations(range(3))
            )
            self.assertTrue(
                np.isclose(wasserstein(mu, nu, 2.0, exact=True), brute, rtol=0, atol=1e-12)
            )

    def test_same_measure(self):
        rng = np.random.default_rng(4)
        atoms = [random_pspm(rng) for _ in range(4)]
        mu = EmpiricalMeasure(atoms)
        nu = EmpiricalMeasure(list(reversed(atoms)))
        self.assertEqual(wasserstein(mu, nu, 2.0), 0.0)

    def test_orbit_invariant(self):
        f = Pspm.from_atoms([(1, 0, 0.5), (1, 1, 0.2)])
        g = translate(f, offsets={1: [9]}, level_map={1: 3})
        mu = EmpiricalMeasure([f, Pspm.zero()])
        nu = EmpiricalMeasure([Pspm.zero(), g])
        self.assertEqual(wasserstein(mu, nu, 2.0), 0.0)

    def test_single_atoms(self):
        f = embed({0: 1.0})
        mu = EmpiricalMeasure([f])
        nu = EmpiricalMeasure([Pspm.zero()])
        self.assertTrue(np.isclose(wasserstein(mu, nu, 2.0), 1.0))

    def test_errors(self):
        with self.assertRaises(ValueError):
            wasserstein(
                EmpiricalMeasure([Pspm.zero()]),
                EmpiricalMeasure([Pspm.zero(), Pspm.zero()]),
                2.0,
            )
        many = EmpiricalMeasure([Pspm.zero()] * 513)
        with self.assertRaises(EnumerationSizeError):
            wasserstein(many, many, 2.0)


if __name__ == "__main__":
    unittest.main()
