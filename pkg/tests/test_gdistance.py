"""
Tests for g-distances and the property checks on aggregators g.
"""

import unittest
from fractions import Fraction


class TestGFunctions(unittest.TestCase):
    """Builders and validation."""

    def test_weighted_sum_values(self):
        from app.services.gdistance import make_weighted_sum_g

        self.assertEqual(make_weighted_sum_g(1, 3)((1, 2, 3)), 6)
        self.assertEqual(make_weighted_sum_g(Fraction(1, 2), 3)((2, 2, 2)), 3)
        self.assertEqual(make_weighted_sum_g(0, 3)((5, 1, 7)), 0)
        self.assertEqual(make_weighted_sum_g(1, 3).name, "sum")

    def test_builtins(self):
        from app.services.gdistance import BUILTIN_G

        self.assertEqual(BUILTIN_G["max"](3)((1, 5, 2)), 5)
        self.assertEqual(BUILTIN_G["min"](3)((4, 2, 9)), 6)
        self.assertEqual(BUILTIN_G["sum2"](2)((1, 2)), 9)

    def test_validation(self):
        from app.services.errors import ArgumentError
        from app.services.gdistance import GFunction, make_weighted_sum_g

        with self.assertRaises(ArgumentError):
            make_weighted_sum_g(-1, 3)
        with self.assertRaises(ArgumentError):
            GFunction(arity=1, fn=sum)
        with self.assertRaises(ArgumentError):
            GFunction(arity=3, fn=sum, declared_properties={"convex"})
        with self.assertRaises(ArgumentError):
            make_weighted_sum_g(1, 3)((1, 2))


class TestPropertyChecks(unittest.TestCase):
    """Falsification by sampling."""

    def test_weighted_sum_has_every_property(self):
        from app.services.gdistance import (
            check_additive_form,
            check_concavity,
            check_positively_homogeneous,
            check_superadditive,
            check_symmetric,
            make_weighted_sum_g,
        )

        g = make_weighted_sum_g(Fraction(3, 2), 4)
        self.assertTrue(check_symmetric(g, samples=200, seed=1).holds)
        self.assertTrue(check_positively_homogeneous(g, samples=200, seed=1).holds)
        self.assertTrue(check_superadditive(g, samples=200, seed=1).holds)
        self.assertTrue(check_concavity(g, samples=200, seed=1).holds)
        self.assertEqual(check_additive_form(g, samples=200, seed=1), (True, Fraction(3, 2)))

    def test_recovered_lambda_is_exact(self):
        from app.services.gdistance import check_additive_form, make_weighted_sum_g

        for lam in (0, 1, 2, Fraction(1, 3), Fraction(7, 4)):
            holds, recovered = check_additive_form(make_weighted_sum_g(lam, 3), samples=50, seed=2)
            self.assertTrue(holds)
            self.assertEqual(recovered, lam)

    def test_max_is_homogeneous_not_superadditive(self):
        from app.services.gdistance import (
            check_additive_form,
            check_positively_homogeneous,
            check_superadditive,
            make_max_g,
        )

        g = make_max_g(3)
        self.assertTrue(check_positively_homogeneous(g, samples=200, seed=3).holds)
        report = check_superadditive(g, samples=200, seed=3)
        self.assertFalse(report.holds)
        self.assertEqual(report.counterexample["r"], [1, 0, 0])
        self.assertEqual(report.counterexample["s"], [0, 1, 0])
        self.assertEqual(check_additive_form(g, samples=50, seed=3), (False, None))

    def test_scaled_min_is_concave(self):
        from app.services.gdistance import check_concavity, check_superadditive, make_scaled_min_g

        g = make_scaled_min_g(3)
        self.assertTrue(check_superadditive(g, samples=300, seed=4).holds)
        self.assertTrue(check_concavity(g, samples=300, seed=4).holds)

    def test_squared_sum_is_not_homogeneous(self):
        from app.services.gdistance import check_positively_homogeneous, check_superadditive, make_squared_sum_g

        g = make_squared_sum_g(3)
        self.assertFalse(check_positively_homogeneous(g, samples=50, seed=5).holds)
        self.assertTrue(check_superadditive(g, samples=200, seed=5).holds)

    def test_concavity_needs_declarations(self):
        from app.services.errors import ConfigurationError
        from app.services.gdistance import check_concavity, make_max_g, make_squared_sum_g

        for g in (make_max_g(3), make_squared_sum_g(3)):
            with self.assertRaises(ConfigurationError):
                check_concavity(g, samples=10)

    def test_reports_are_deterministic(self):
        from app.services.gdistance import check_superadditive, make_max_g

        a = check_superadditive(make_max_g(4), samples=100, seed=6)
        b = check_superadditive(make_max_g(4), samples=100, seed=6)
        self.assertEqual(a.model_dump(), b.model_dump())


class TestIsGDistance(unittest.TestCase):
    """d(x) <= g(replaced values) plus symmetry and identity."""

    def test_drastic_with_plain_sum(self):
        from app.services.elementary import drastic
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        report = is_g_distance(drastic(3), make_weighted_sum_g(1, 3), samples=300, seed=1)
        self.assertTrue(report.passed)
        self.assertEqual(report.counterexamples, [])

    def test_drastic_with_half_sum(self):
        from app.services.elementary import drastic
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        report = is_g_distance(drastic(3), make_weighted_sum_g(Fraction(1, 2), 3), samples=300, seed=1)
        self.assertTrue(report.passed)

    def test_drastic_fails_below_best_constant(self):
        from app.services.elementary import drastic
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        report = is_g_distance(drastic(3), make_weighted_sum_g(Fraction(2, 5), 3), samples=300, seed=1)
        self.assertFalse(report.passed)
        first = report.counterexamples[0]
        self.assertEqual(first["condition"], "g-simplex")
        self.assertEqual(first["points"], [0, 0, 1])
        self.assertEqual(first["pivot"], 0)
        self.assertEqual(first["lhs"], 1)
        self.assertEqual(first["rhs"], "4/5")

    def test_arity_mismatch(self):
        from app.services.elementary import drastic
        from app.services.errors import ConfigurationError
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        with self.assertRaises(ConfigurationError):
            is_g_distance(drastic(3), make_weighted_sum_g(1, 4), samples=10)

    def test_asymmetric_map_is_reported(self):
        from app.services.core import NDistance
        from app.services.gdistance import is_g_distance, make_weighted_sum_g
        from app.services.spaces import RealLine

        first = NDistance(name="first", arity=2, space=RealLine(), evaluate=lambda p: abs(p[0]))
        report = is_g_distance(first, make_weighted_sum_g(1, 2), samples=100, seed=2)
        self.assertIn("symmetry", {c["condition"] for c in report.counterexamples})


class TestCombinatorsPreserveGDistances(unittest.TestCase):
    """Scaling, sums and bounding of g-distances."""

    def test_scaling_under_homogeneous_g(self):
        from app.services.elementary import drastic, scale
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        g = make_weighted_sum_g(Fraction(1, 2), 3)
        for factor in (Fraction(1, 2), 2, 10):
            self.assertTrue(is_g_distance(scale(drastic(3), factor), g, samples=200, seed=3).passed, factor)

    def test_sum_under_superadditive_g(self):
        from app.services.elementary import cardinality, combine_add, drastic
        from app.services.gdistance import is_g_distance, make_weighted_sum_g

        g = make_weighted_sum_g(Fraction(1, 2), 3)
        d = combine_add(drastic(3), cardinality(3))
        self.assertTrue(is_g_distance(d, g, samples=300, seed=4).passed)

    def test_bounding_with_lambda_at_least_one(self):
        from app.services.elementary import diameter
        from app.services.gdistance import bound_g_distance, make_weighted_sum_g

        bounded = bound_g_distance(diameter(3), make_weighted_sum_g(1, 3), samples=300, seed=5)
        self.assertEqual(bounded.name, "bound(diameter)")
        self.assertTrue(bounded.metadata["g_report"].passed)

    def test_bounding_preconditions(self):
        from app.services.elementary import drastic
        from app.services.errors import PreconditionError
        from app.services.gdistance import bound_g_distance, make_max_g, make_weighted_sum_g

        with self.assertRaises(PreconditionError):
            bound_g_distance(drastic(3), make_weighted_sum_g(Fraction(1, 2), 3), samples=20)
        with self.assertRaises(PreconditionError):
            bound_g_distance(drastic(3), make_max_g(3), samples=20)


if __name__ == "__main__":
    unittest.main()
