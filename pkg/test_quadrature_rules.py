import math
import unittest

import numpy as np
from scipy import special

from errors import InputError
from quadrature_rules import (
    Block,
    QuadratureSpec,
    half_line_rule,
    region_dimension,
    region_name,
    tensor_grid,
    unit_interval_rule,
)


class AxisRuleTests(unittest.TestCase):
    def test_interval_rule_integrates_singular_beta_kernel(self) -> None:
        rule = unit_interval_rule(6)
        a, b = 0.3, 0.45
        value = np.sum(rule.weights * rule.nodes ** (a - 1) * rule.complements ** (b - 1))
        self.assertAlmostEqual(value, special.beta(a, b), places=9)

    def test_complements_are_accurate_near_one(self) -> None:
        rule = unit_interval_rule(8)
        np.testing.assert_allclose(rule.nodes + rule.complements, 1.0, rtol=1e-15)
        self.assertLess(rule.complements.min(), 1e-80)

    def test_nested_rule_agrees_on_smooth_integrand(self) -> None:
        rule = unit_interval_rule(6)
        f = np.exp(rule.nodes)
        fine = np.sum(rule.weights * f)
        coarse = np.sum(rule.coarse_weights * f)
        self.assertAlmostEqual(fine, math.e - 1, places=10)
        self.assertAlmostEqual(coarse, math.e - 1, places=5)

    def test_half_line_rule_integrates_gamma_kernel(self) -> None:
        rule = half_line_rule(8, 60.0)
        value = np.sum(rule.weights * rule.nodes ** (0.4 - 1) * np.exp(-rule.nodes))
        self.assertAlmostEqual(value, special.gamma(0.4), places=8)

    def test_half_line_rule_integrates_exponential(self) -> None:
        for level in (5, 6, 8):
            rule = half_line_rule(level, 50.0)
            value = np.sum(rule.weights * np.exp(-rule.nodes))
            with self.subTest(level=level):
                self.assertLess(abs(value - 1.0), 1e-10)

    def test_half_line_rule_follows_slow_decay(self) -> None:
        rate = 0.225
        rule = half_line_rule(6, 50.0 / rate)
        value = np.sum(rule.weights * rule.nodes ** 1.5 * np.exp(-rate * rule.nodes))
        expected = special.gamma(2.5) / rate ** 2.5
        self.assertLess(abs(value - expected) / expected, 1e-10)

    def test_half_line_nodes_stay_below_truncation(self) -> None:
        rule = half_line_rule(6, 50.0)
        self.assertLessEqual(rule.nodes.max(), 50.0)
        self.assertGreater(rule.nodes.min(), 0.0)
        self.assertIsNone(rule.complements)

    def test_rules_are_read_only(self) -> None:
        rule = unit_interval_rule(5)
        with self.assertRaises(ValueError):
            rule.weights[0] = 1.0

    def test_bad_arguments(self) -> None:
        with self.assertRaises(InputError):
            unit_interval_rule(0)
        with self.assertRaises(InputError):
            half_line_rule(4, 0.5)
        with self.assertRaises(InputError):
            QuadratureSpec(level=2)
        with self.assertRaises(InputError):
            QuadratureSpec(region="sphere")


class TensorGridTests(unittest.TestCase):
    def test_simplex_volumes(self) -> None:
        for n in (1, 2, 3):
            grid = tensor_grid((Block.simplex(n),), 5)
            self.assertAlmostEqual(np.sum(grid.weights), 1.0 / math.factorial(n), places=10)

    def test_simplex_slack_is_one_minus_sum(self) -> None:
        grid = tensor_grid((Block.simplex(3),), 4)
        block = grid.blocks[0]
        np.testing.assert_allclose(block.slack, 1.0 - sum(block.coords), atol=1e-14)
        self.assertTrue(np.all(block.slack >= 0))

    def test_dirichlet_moment_on_triangle(self) -> None:
        # integral of u^(a-1) v^(b-1) (1-u-v)^(c-1) = G(a)G(b)G(c)/G(a+b+c)
        a, b, c = 0.6, 1.3, 0.8
        grid = tensor_grid((Block.simplex(2),), 6)
        u, v = grid.blocks[0].coords
        w = grid.blocks[0].slack
        value = np.sum(grid.weights * u ** (a - 1) * v ** (b - 1) * w ** (c - 1))
        expected = special.gamma(a) * special.gamma(b) * special.gamma(c) / special.gamma(a + b + c)
        self.assertAlmostEqual(value, expected, places=8)

    def test_mixed_blocks(self) -> None:
        grid = tensor_grid((Block.interval(), Block.half_line(50.0)), 6)
        x = grid.blocks[0].coords[0]
        t = grid.blocks[1].coords[0]
        self.assertIsNone(grid.blocks[1].slack)
        value = np.sum(grid.weights * x * np.exp(-t))
        self.assertAlmostEqual(value, 0.5, places=9)

    def test_take_keeps_blocks_aligned(self) -> None:
        grid = tensor_grid((Block.simplex(2),), 4)
        part = grid.take(slice(0, 10))
        self.assertEqual(part.size, 10)
        np.testing.assert_array_equal(part.blocks[0].coords[1], grid.blocks[0].coords[1][:10])

    def test_region_names(self) -> None:
        self.assertEqual(region_name((Block.interval(), Block.interval())), "unit-cube")
        self.assertEqual(region_name((Block.simplex(3),)), "simplex")
        self.assertEqual(region_name(tuple(Block.half_line(50.0) for _ in range(3))), "semi-infinite-octant")
        self.assertEqual(region_name((Block.interval(), Block.half_line(50.0))), "product")
        self.assertEqual(region_dimension((Block.simplex(2), Block.interval())), 3)

    def test_requested_region_is_checked(self) -> None:
        QuadratureSpec(region="simplex", dimension=1).require((Block.interval(),))
        QuadratureSpec(region="unit-cube", dimension=2).require((Block.interval(), Block.interval()))
        with self.assertRaises(InputError):
            QuadratureSpec(region="simplex").require((Block.interval(), Block.interval()))
        with self.assertRaises(InputError):
            QuadratureSpec(dimension=3).require((Block.simplex(2),))

    def test_empty_region_rejected(self) -> None:
        with self.assertRaises(InputError):
            tensor_grid((), 4)


if __name__ == "__main__":
    unittest.main(verbosity=2)
