"""
Tests for Fermat n-distances: the Weiszfeld solver, the constant sandwich,
graph distances, medians and exact best constants.
"""

import math
import unittest
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

FIXTURES_DIR = Path(__file__).parent / "fixtures"


class TestWeiszfeld(unittest.TestCase):
    """Geometric median with optimality certificate."""

    def test_single_point(self):
        from app.services.fermat import weiszfeld

        result = weiszfeld([(2.0, 3.0), (2.0, 3.0)])
        self.assertEqual(result.minimizer, (2.0, 3.0))
        self.assertEqual(result.value, 0.0)
        self.assertTrue(result.converged)

    def test_equilateral_triangle(self):
        from app.services.fermat import weiszfeld

        result = weiszfeld([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)])
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.value, math.sqrt(3), delta=1e-7)
        self.assertAlmostEqual(result.minimizer[0], 0.5, delta=1e-5)
        self.assertAlmostEqual(result.minimizer[1], math.sqrt(3) / 6, delta=1e-5)

    def test_square_center(self):
        from app.services.fermat import weiszfeld

        result = weiszfeld([(0, 0), (1, 0), (1, 1), (0, 1)])
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.value, 2 * math.sqrt(2), delta=1e-9)
        self.assertAlmostEqual(result.minimizer[0], 0.5, delta=1e-9)
        self.assertAlmostEqual(result.minimizer[1], 0.5, delta=1e-9)

    def test_collinear_middle_anchor(self):
        from app.services.fermat import weiszfeld

        result = weiszfeld([(0, 0), (1, 0), (2, 0)])
        self.assertTrue(result.converged)
        self.assertEqual(result.anchor, 1)
        self.assertEqual(result.value, 2.0)
        self.assertEqual(result.iterations, 0)

    def test_heavy_anchor_wins(self):
        from app.services.fermat import weiszfeld

        result = weiszfeld([(0, 0), (0, 0), (0, 0), (5, 1), (-2, 7)])
        self.assertEqual(result.minimizer, (0.0, 0.0))

    def test_never_beaten_on_random_instances(self):
        from app.services.fermat import weiszfeld

        rng = np.random.default_rng(21)
        offsets = [np.array(o) for o in ((1e-3, 0), (-1e-3, 0), (0, 1e-3), (0, -1e-3), (7e-4, 7e-4))]
        for _ in range(20):
            pts = rng.uniform(-5, 5, size=(5, 2))
            result = weiszfeld(pts)
            self.assertTrue(result.converged)
            y = np.array(result.minimizer)
            for candidate in [y + o for o in offsets] + list(pts):
                other = float(np.linalg.norm(pts - candidate, axis=1).sum())
                self.assertLessEqual(result.value, other + 1e-5)

    def test_minimizer_next_to_an_anchor(self):
        """The anchor test just fails, so plain reweighting crawls; the result must still certify."""
        from app.services.fermat import fermat_distance_euclidean, weiszfeld

        pts = [
            (0.4095601087159991, 0.357989660830886),
            (0.43503570652372203, 0.31209102534678623),
            (0.7580728885183325, 0.3066331168548725),
        ]
        result = weiszfeld(pts)
        self.assertTrue(result.converged, result.notes)
        self.assertIsNone(result.anchor)
        self.assertLessEqual(result.gradient_norm, math.sqrt(1e-10) * 3)

        arr = np.array(pts)
        y = np.array(result.minimizer)
        for candidate in list(arr) + [y + o for o in ((1e-6, 0), (-1e-6, 0), (0, 1e-6), (0, -1e-6))]:
            other = float(np.linalg.norm(arr - candidate, axis=1).sum())
            self.assertLessEqual(result.value, other + 1e-10)
        self.assertAlmostEqual(fermat_distance_euclidean(3)(tuple(pts)), result.value, delta=1e-12)

    def test_invalid_input(self):
        from app.services.errors import ArgumentError
        from app.services.fermat import weiszfeld

        with self.assertRaises(ArgumentError):
            weiszfeld([])
        with self.assertRaises(ArgumentError):
            weiszfeld([(0.0, float("nan"))])
        with self.assertRaises(ArgumentError):
            weiszfeld([(0.0, 1.0)], tol=0)


class TestEuclideanFermatDistance(unittest.TestCase):
    """The Euclidean Fermat n-distance and its constant sandwich."""

    def test_two_points_is_their_distance(self):
        from app.services.fermat import fermat_distance_euclidean

        self.assertAlmostEqual(fermat_distance_euclidean(2)(((0, 0), (3, 4))), 5.0, delta=1e-12)

    def test_witness_ratios(self):
        from app.services.core import simplex_ratio
        from app.services.fermat import fermat_distance_euclidean

        two = fermat_distance_euclidean(2)
        three = fermat_distance_euclidean(3)
        self.assertAlmostEqual(float(simplex_ratio(two, two.witnesses[0]).ratio), 1.0, delta=1e-12)
        self.assertAlmostEqual(float(simplex_ratio(three, three.witnesses[0]).ratio), 0.5, delta=1e-12)

    def test_bounds(self):
        from app.services.fermat import fermat_bounds

        self.assertEqual(fermat_bounds(3), (Fraction(1, 2), Fraction(1), Fraction(8, 15)))
        for n in range(2, 31):
            lo, coarse, refined = fermat_bounds(n)
            self.assertLessEqual(refined, coarse)
            self.assertLessEqual(lo, refined)

    def test_theoretical_interval(self):
        from app.services.fermat import fermat_distance_euclidean

        k = fermat_distance_euclidean(3).theoretical_k
        self.assertEqual((k.lo, k.hi), (Fraction(1, 2), Fraction(8, 15)))

    def test_sampled_ratios_respect_refined_bound(self):
        from app.services.core import simplex_ratio
        from app.services.fermat import fermat_distance_euclidean

        d = fermat_distance_euclidean(3)
        sampler = d.sampler(tie_rate=0.0)
        for index in range(300):
            ratio = simplex_ratio(d, sampler.sample_at(4, index)).ratio
            self.assertLessEqual(float(ratio), 8 / 15 + 1e-7)

    def test_pivot_at_fermat_point_reaches_lower_bound(self):
        from app.models.domain import Config
        from app.services.core import eval_replaced, simplex_ratio
        from app.services.fermat import fermat_distance_euclidean, weiszfeld
        from app.services.spaces import ConfigSampler, Plane

        for n in (3, 4, 5):
            d = fermat_distance_euclidean(n)
            sampler = ConfigSampler(Plane(), n, tie_rate=0.0)
            for index in range(40):
                points = sampler.sample_at(11, index).points
                z = weiszfeld(points).minimizer
                c = Config(points=points, pivot=z)
                self.assertGreaterEqual(float(simplex_ratio(d, c).ratio), 1 / (n - 1) - 1e-7)
                for i in range(1, n + 1):
                    others = sum(math.dist(points[j], z) for j in range(n) if j != i - 1)
                    self.assertLessEqual(float(eval_replaced(d, c, i)), others + 1e-7)

    def test_higher_dimension(self):
        from app.services.fermat import fermat_distance_euclidean

        d = fermat_distance_euclidean(3, k=3)
        self.assertEqual(d.metadata["dimension"], 3)
        self.assertAlmostEqual(d(((0, 0, 0), (0, 0, 0), (0, 0, 2))), 2.0, delta=1e-12)


class TestGraphBasics(unittest.TestCase):
    """Loading graphs and BFS distances."""

    def test_bfs(self):
        from app.services.fermat import bfs_all_pairs
        from lib import graph_lib

        self.assertEqual(bfs_all_pairs(graph_lib.path_graph(4))[0, 3], 3)
        self.assertEqual(bfs_all_pairs(graph_lib.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))[0, 2], 2)
        dm = bfs_all_pairs(graph_lib.hypercube_graph(3))
        self.assertEqual(dm[0, 7], 3)
        self.assertTrue((dm == dm.T).all())

    def test_bfs_rejects_disconnected(self):
        from app.services.errors import GraphStructureError
        from app.services.fermat import bfs_all_pairs
        from lib import graph_lib

        with self.assertRaises(GraphStructureError):
            bfs_all_pairs(graph_lib.from_edges(4, [(0, 1), (2, 3)]))

    def test_load_fixture(self):
        from app.services.fermat import load_graph

        g = load_graph(FIXTURES_DIR / "grid3x3.txt")
        self.assertEqual((g.number_of_nodes(), g.number_of_edges()), (9, 12))

    def test_load_errors(self):
        from app.services.errors import ConfigurationError, GraphStructureError, ParseError
        from app.services.fermat import load_graph

        with self.assertRaises(GraphStructureError):
            load_graph(FIXTURES_DIR / "disconnected.txt")
        with self.assertRaises(ParseError):
            load_graph(FIXTURES_DIR / "loop.txt")
        with self.assertRaises(ParseError):
            load_graph(FIXTURES_DIR / "no_such_graph.txt")
        with self.assertRaises(ConfigurationError):
            load_graph(FIXTURES_DIR / "grid3x3.txt", vertex_cap=4)


class TestMedians(unittest.TestCase):
    """Fermat values, medians and median-graph recognition."""

    def test_fermat_value_on_a_path(self):
        from app.services.fermat import bfs_all_pairs, fermat_value_graph
        from lib import graph_lib

        g = graph_lib.path_graph(3)
        dm = bfs_all_pairs(g)
        self.assertEqual(fermat_value_graph(g, dm, (0, 2, 2)), (2, (2,)))
        self.assertEqual(fermat_value_graph(g, dm, (0, 2)), (2, (0, 1, 2)))

    def test_hypercube_median(self):
        from app.services.fermat import bfs_all_pairs, median_vertex
        from lib import graph_lib

        g = graph_lib.hypercube_graph(3)
        self.assertEqual(median_vertex(g, bfs_all_pairs(g), 0, 3, 5), 1)

    def test_bipartite_triple_has_two_medians(self):
        from app.services.errors import NotMedianError
        from app.services.fermat import bfs_all_pairs, median_vertex
        from lib import graph_lib

        g = graph_lib.complete_bipartite_graph(2, 3)
        with self.assertRaises(NotMedianError) as ctx:
            median_vertex(g, bfs_all_pairs(g), 2, 3, 4)
        self.assertEqual(ctx.exception.candidates, [0, 1])
        self.assertEqual(ctx.exception.triple, (2, 3, 4))

    def test_recognition(self):
        from app.services.fermat import find_non_median_triple, is_median_graph
        from lib import graph_lib

        rng = np.random.default_rng(3)
        for g in (graph_lib.path_graph(5), graph_lib.grid_graph(3, 3), graph_lib.hypercube_graph(3),
                  graph_lib.random_tree(12, rng)):
            self.assertTrue(is_median_graph(g))
        self.assertFalse(is_median_graph(graph_lib.complete_bipartite_graph(2, 3)))
        triangle = find_non_median_triple(graph_lib.complete_graph(3))
        self.assertEqual(triangle.triple, (0, 1, 2))
        self.assertEqual(triangle.candidates, [])

    def test_median_value_formula_and_unique_minimizer(self):
        from app.services.fermat import bfs_all_pairs, fermat_value_graph, median_vertex
        from lib import graph_lib

        for g in (graph_lib.grid_graph(3, 3), graph_lib.hypercube_graph(3)):
            dm = bfs_all_pairs(g)
            for u, v, w in combinations(range(g.number_of_nodes()), 3):
                value, minimizers = fermat_value_graph(g, dm, (u, v, w))
                self.assertEqual(2 * value, dm[u, v] + dm[u, w] + dm[v, w])
                self.assertEqual(minimizers, (median_vertex(g, dm, u, v, w),))


class TestGraphBestConstant(unittest.TestCase):
    """Exhaustive best constants of the Fermat 3-distance."""

    def test_median_graphs_give_one_half(self):
        from app.services.fermat import bfs_all_pairs, graph_best_constant
        from lib import graph_lib

        rng = np.random.default_rng(8)
        for g in (graph_lib.grid_graph(3, 3), graph_lib.hypercube_graph(3), graph_lib.path_graph(6),
                  graph_lib.random_tree(10, rng)):
            best, at = graph_best_constant(bfs_all_pairs(g))
            self.assertEqual(best, Fraction(1, 2))
            self.assertEqual(len(at), 4)

    def test_non_median_graph_stays_in_sandwich(self):
        from app.services.fermat import bfs_all_pairs, graph_best_constant
        from lib import graph_lib

        for g in (graph_lib.complete_bipartite_graph(2, 3), graph_lib.complete_graph(4)):
            best, _ = graph_best_constant(bfs_all_pairs(g))
            self.assertGreaterEqual(best, Fraction(1, 2))
            self.assertLessEqual(best, Fraction(8, 15))

    def test_limits(self):
        from app.services.errors import ArgumentError, ConfigurationError
        from app.services.fermat import bfs_all_pairs, graph_best_constant
        from lib import graph_lib

        dm = bfs_all_pairs(graph_lib.path_graph(5))
        with self.assertRaises(ArgumentError):
            graph_best_constant(dm, n=4)
        with self.assertRaises(ConfigurationError):
            graph_best_constant(dm, vertex_cap=3)


class TestGraphDistances(unittest.TestCase):
    """NDistance wrappers over graphs."""

    def test_fermat3_on_a_path(self):
        from app.services.fermat import fermat3_graph_distance
        from lib import graph_lib

        d = fermat3_graph_distance(graph_lib.path_graph(3))
        self.assertEqual(d.name, "fermat3_graph")
        self.assertTrue(d.metadata["median"])
        self.assertEqual(d.theoretical_k.lo, Fraction(1, 2))
        self.assertEqual(d((0, 1, 2)), 2)
        self.assertEqual(d((0, 0, 2)), 2)

    def test_non_median_graph_keeps_sandwich(self):
        from app.services.fermat import fermat3_graph_distance
        from lib import graph_lib

        d = fermat3_graph_distance(graph_lib.complete_graph(3))
        self.assertFalse(d.metadata["median"])
        self.assertEqual(d.theoretical_k.hi, Fraction(8, 15))

    def test_graph_distance_passes_axioms(self):
        from app.services.core import verify_axioms
        from app.services.fermat import fermat_graph_distance
        from lib import graph_lib

        d = fermat_graph_distance(graph_lib.grid_graph(3, 3), 4)
        self.assertTrue(verify_axioms(d, samples=200, seed=2).passed)

    def test_estimate_on_grid_is_one_half(self):
        from app.models.schemas import OptimizerSettings
        from app.services.core import estimate_best_constant
        from app.services.fermat import fermat3_graph_distance, load_graph

        d = fermat3_graph_distance(load_graph(FIXTURES_DIR / "grid3x3.txt"))
        report = estimate_best_constant(d, budget=300, seed=1, refine=OptimizerSettings(starts=2, steps=20))
        self.assertEqual(report.best_ratio, Fraction(1, 2))
        self.assertEqual(report.violations, [])


if __name__ == "__main__":
    unittest.main()
