# Standard Library Imports
import json
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.pspm import (
    EmpiricalMeasure,
    Pspm,
    canonical_form,
    embed,
    level_pmf,
    recover_orbit,
    translate,
    truncate,
)
from polylab.utils.lattice import LatticePmf
from polylab.utils.polylab_exceptions import MassError


class TestPspm(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.f = Pspm.from_atoms([(2, 0, 0.3), (1, 5, 0.2), (1, -1, 0.4), (3, 0, 0.0)])

    def test_sorted_and_norm(self):
        self.assertEqual(
            self.f.atoms(), [(1, (-1,), 0.4), (1, (5,), 0.2), (2, (0,), 0.3)]
        )
        self.assertTrue(np.isclose(self.f.norm, 0.9))
        self.assertEqual(self.f.level_set(), [1, 2])
        self.assertTrue(np.isclose(self.f.level_mass(1), 0.6))
        self.assertEqual(len(self.f), 3)

    def test_read_only(self):
        with self.assertRaises(ValueError):
            self.f.masses[0] = 0.1

    def test_top_atoms(self):
        self.assertEqual([a[2] for a in self.f.top_atoms(2)], [0.4, 0.3])
        tied = Pspm.from_atoms([(2, 0, 0.25), (1, 3, 0.25), (1, 1, 0.25)])
        self.assertEqual(
            [a[:2] for a in tied.top_atoms(3)], [(1, (1,)), (1, (3,)), (2, (0,))]
        )

    def test_json(self):
        text = json.dumps(self.f.to_json())
        self.assertEqual(Pspm.from_json(text), self.f)
        self.assertEqual(Pspm.from_json(json.loads(text)), self.f)
        with self.assertRaises(ValueError):
            Pspm.from_json({"mass": []})

    def test_zero(self):
        zero = Pspm.zero(2)
        self.assertEqual(zero.norm, 0.0)
        self.assertEqual(zero.d, 2)
        self.assertEqual(Pspm.from_atoms([], d=2), zero)

    def test_errors(self):
        with self.assertRaises(MassError):
            Pspm.from_atoms([(1, 0, 0.7), (1, 1, 0.5)])
        with self.assertRaises(MassError):
            Pspm.from_atoms([(1, 0, -0.1)])
        with self.assertRaises(ValueError):
            Pspm.from_atoms([(1, 0, 0.2), (1, 0, 0.3)])
        with self.assertRaises(ValueError):
            Pspm.from_atoms([(0, 0, 0.2)])
        with self.assertRaises(ValueError):
            Pspm.from_atoms([(1, 0, 0.2), (1, (0, 1), 0.3)])

    def test_mass_tolerance(self):
        f = Pspm.from_atoms([(1, 0, 0.5), (1, 1, 0.5 + 1e-13)])
        self.assertGreater(f.norm, 1.0)


class TestPspmFunctions(unittest.TestCase):
    def test_embed(self):
        f = embed({0: 0.5, 2: 0.5})
        self.assertEqual(f.level_set(), [1])
        self.assertTrue(np.isclose(f.norm, 1.0))
        pmf = LatticePmf.from_mapping({(0, 1): 0.25, (1, 1): 0.25})
        self.assertEqual(embed(pmf).d, 2)
        with self.assertRaises(MassError):
            embed({0: 0.8, 1: 0.8})

    def test_level_pmf(self):
        f = Pspm.from_atoms([(1, 0, 0.3), (2, 4, 0.2)])
        self.assertEqual(level_pmf(f, 2).as_dict(), {(4,): 0.2})
        self.assertEqual(len(level_pmf(f, 3)), 0)

    def test_translate(self):
        f = Pspm.from_atoms([(1, 2, 0.5), (2, 0, 0.3)])
        g = translate(f, offsets={1: [2]}, level_map={1: 2, 2: 1})
        self.assertEqual(g.atoms(), [(1, (0,), 0.3), (2, (0,), 0.5)])
        with self.assertRaises(ValueError):
            translate(f, level_map={1: 2})

    def test_truncate(self):
        f = Pspm.from_atoms([(1, 0, 0.5), (1, 1, 0.1), (2, 0, 0.3)])
        kept = truncate(f, 2)
        self.assertEqual(kept.atoms(), [(1, (0,), 0.5), (2, (0,), 0.3)])
        self.assertIs(truncate(f, 5), f)
        with self.assertRaises(ValueError):
            truncate(f, 0)

    def test_canonical_form(self):
        f = Pspm.from_atoms([(3, 7, 0.2), (3, 9, 0.1), (5, -2, 0.5)])
        g = translate(f, offsets={3: [4], 5: [-6]}, level_map={3: 1, 5: 8})
        self.assertEqual(canonical_form(f), canonical_form(g))
        self.assertEqual(
            canonical_form(f).atoms(), [(1, (0,), 0.5), (2, (0,), 0.2), (2, (2,), 0.1)]
        )

    def test_recover_orbit(self):
        f = Pspm.from_atoms([(1, 0, 0.4), (1, 2, 0.1), (2, 5, 0.4)])
        g = translate(f, offsets={1: [3], 2: [-1]}, level_map={1: 2, 2: 1})
        recovered = recover_orbit(f, g)
        self.assertIsNotNone(recovered)
        sigma, offsets = recovered
        self.assertEqual(translate(f, offsets=offsets, level_map=sigma), g)

    def test_recover_orbit_fails(self):
        f = Pspm.from_atoms([(1, 0, 0.4), (1, 2, 0.1)])
        self.assertIsNone(recover_orbit(f, Pspm.from_atoms([(1, 0, 0.4), (1, 3, 0.1)])))
        self.assertIsNone(recover_orbit(f, Pspm.from_atoms([(1, 0, 0.5)])))
        self.assertEqual(recover_orbit(Pspm.zero(), Pspm.zero()), ({}, {}))


class TestEmpiricalMeasure(unittest.TestCase):
    def test_weights(self):
        mu = EmpiricalMeasure([Pspm.zero(), embed({0: 1.0})])
        self.assertEqual(len(mu), 2)
        self.assertTrue(np.allclose(mu.weights, 0.5))

    def test_empty(self):
        with self.assertRaises(ValueError):
            EmpiricalMeasure([])


if __name__ == "__main__":
    unittest.main()
