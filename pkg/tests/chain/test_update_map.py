# Standard Library Imports
import math
import unittest

# External Imports
import numpy as np

# Local Imports
from polylab.chain import (
    EnvironmentRow,
    TranslatedRow,
    UpdateContext,
    apply_update,
    auto_alpha,
)
from polylab.chain.update_map import _update
from polylab.environment import SeededField, exponential, gaussian, log_mgf, uniform
from polylab.polymer import run_polymer
from polylab.pspm import Pspm, d_alpha_exact, embed, translate
from polylab.utils.polylab_exceptions import DomainError
from polylab.walk import srw


class TestUpdateContext(unittest.TestCase):
    def test_lambda(self):
        ctx = UpdateContext(walk=srw(1), beta=0.7, law=gaussian())
        self.assertEqual(ctx.lam, log_mgf(gaussian(), 0.7))

    def test_errors(self):
        with self.assertRaises(ValueError):
            UpdateContext(walk=srw(1), beta=0.5, law=gaussian(), alpha=1.0)
        with self.assertRaises(DomainError):
            UpdateContext(walk=srw(1), beta=0.6, law=exponential(1.0), alpha=2.0)
        with self.assertRaises(DomainError):
            UpdateContext(walk=srw(1), beta=0.0, law=gaussian())

    def test_auto_alpha(self):
        self.assertEqual(auto_alpha(3.0, gaussian()), 2.0)
        self.assertEqual(auto_alpha(0.2, exponential(1.0)), 2.0)
        alpha = auto_alpha(0.6, exponential(1.0))
        self.assertTrue(np.isclose(alpha, (1.0 + 1.0 / 0.6) / 2.0))
        self.assertLess(alpha * 0.6, 1.0)
        self.assertGreater(alpha, 1.0)
        # Valid for every beta in the domain
        for beta in [0.01, 0.3, 0.9, 0.999]:
            a = auto_alpha(beta, exponential(1.0))
            UpdateContext(walk=srw(1), beta=beta, law=exponential(1.0), alpha=a)


class TestApplyUpdate(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.ctx = UpdateContext(walk=srw(1), beta=0.8, law=gaussian())
        cls.field = SeededField(seed=13, law=gaussian())

    def test_zero_fixed_point(self):
        zero = Pspm.zero()
        for seed in range(5):
            image, log_d = apply_update(zero, self.ctx, seed)
            self.assertEqual(len(image), 0)
            self.assertEqual(log_d, self.ctx.lam)

    def test_one_step_closed_form(self):
        image, log_d = apply_update(
            embed({0: 1.0}), self.ctx, EnvironmentRow(self.field, time=1)
        )
        expected = run_polymer(srw(1), self.field, 0.8, 1, tau_rel=None).log_Z
        self.assertTrue(np.isclose(log_d, expected, rtol=0, atol=1e-14))
        eta_plus = self.field.evaluate(1, 1)
        self.assertTrue(
            np.isclose(image.as_dict()[(1, (1,))], 0.5 * math.exp(0.8 * eta_plus - log_d))
        )

    def test_integer_row(self):
        f = embed({0: 0.5, 3: 0.5})
        by_seed = apply_update(f, self.ctx, 4)
        by_row = apply_update(f, self.ctx, EnvironmentRow(self.ctx.environment(4), time=1))
        self.assertEqual(by_seed[1], by_row[1])
        self.assertEqual(by_seed[0], by_row[0])

    def test_norm_one_preserved(self):
        f = Pspm.from_atoms([(1, 0, 0.5), (2, 4, 0.3), (3, 0, 0.2)])
        image, _ = apply_update(f, self.ctx, 7)
        self.assertTrue(np.isclose(image.norm, 1.0, rtol=0, atol=1e-12))

    def test_partial_norm_stays_partial(self):
        f = Pspm.from_atoms([(1, 0, 0.3), (2, 0, 0.2)])
        for seed in range(10):
            image, log_d = apply_update(f, self.ctx, seed)
            self.assertGreater(image.norm, 0.0)
            self.assertLess(image.norm, 1.0)
            # The slack term alone bounds the denominator from below
            self.assertGreater(log_d, math.log(0.5) + self.ctx.lam)

    def test_levels_stay_separate(self):
        f = Pspm.from_atoms([(1, 0, 0.5), (4, 0, 0.5)])
        image, _ = apply_update(f, self.ctx, 1)
        self.assertEqual(image.level_set(), [1, 4])
        self.assertEqual(sorted(x for lv, (x,), _ in image.atoms() if lv == 4), [-1, 1])

    def test_levels_use_separate_streams(self):
        # Level 2 reads stream 1 of the field
        f = Pspm.from_atoms([(2, 0, 1.0)])
        row = EnvironmentRow(self.field, time=3)
        image, log_d = apply_update(f, self.ctx, row)
        stream_one = self.field.with_stream(1)
        expected = math.log(
            0.5 * math.exp(0.8 * stream_one.evaluate(3, -1))
            + 0.5 * math.exp(0.8 * stream_one.evaluate(3, 1))
        )
        self.assertTrue(np.isclose(log_d, expected))

    def test_dimension_mismatch(self):
        with self.assertRaises(ValueError):
            apply_update(embed({(0, 0): 1.0}), self.ctx, 0)

    def test_truncation(self):
        ctx = UpdateContext(walk=srw(1), beta=3.0, law=uniform(), tau_rel=0.9)
        f = embed({x: 0.1 for x in range(0, 20, 2)})
        image, log_d, dropped = _update(f, ctx, 3)
        untruncated, log_d_full = apply_update(
            f, UpdateContext(walk=srw(1), beta=3.0, law=uniform()), 3
        )
        self.assertEqual(log_d, log_d_full)
        self.assertGreater(dropped, 0.0)
        self.assertLess(len(image), len(untruncated))
        self.assertTrue(np.isclose(image.norm + dropped, untruncated.norm))


class TestTranslatedRow(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.ctx = UpdateContext(walk=srw(1), beta=1.1, law=gaussian())
        cls.row = EnvironmentRow(SeededField(seed=99, law=gaussian()), time=2)

    def test_values(self):
        coupled = TranslatedRow(self.row, sigma={1: 3, 2: 1}, offsets={1: [4], 2: [-2]})
        sites = np.arange(-5, 5).reshape(-1, 1)
        self.assertTrue(
            np.array_equal(coupled.values(3, sites), self.row.values(1, sites + 4))
        )
        self.assertTrue(
            np.array_equal(coupled.values(1, sites), self.row.values(2, sites - 2))
        )
        uncoupled = coupled.values(2, sites)
        self.assertTrue(np.array_equal(uncoupled, coupled.values(2, sites)))
        self.assertFalse(np.array_equal(uncoupled, self.row.values(2, sites)))

    def test_same_law_coupling(self):
        f = Pspm.from_atoms([(1, 0, 0.4), (1, 1, 0.2), (2, 5, 0.3)])
        sigma, offsets = {1: 2, 2: 1}, {1: (3,), 2: (-1,)}
        g = translate(f, offsets=offsets, level_map=sigma)
        image_f, log_f = apply_update(f, self.ctx, self.row)
        image_g, log_g = apply_update(g, self.ctx, TranslatedRow(self.row, sigma, offsets))
        self.assertTrue(np.isclose(log_f, log_g, rtol=0, atol=1e-12))
        self.assertLess(d_alpha_exact(image_f, image_g, 2.0), 1e-12)
        expected = translate(image_f, offsets=offsets, level_map=sigma).as_dict()
        for point, mass in image_g.as_dict().items():
            self.assertTrue(np.isclose(mass, expected[point], rtol=0, atol=1e-14))


if __name__ == "__main__":
    unittest.main()
