#!/usr/bin/env python3
"""
Best-Constant Reproduction Sweeps

Runs every closed-form constant, sandwich and oracle check at full sample
counts and prints a pass/fail line per check:

- constants table for the elementary and enclosing-circle distances
- simplex soundness fuzz at the known constants
- Fermat sandwich in the plane, median graphs, direction counts
- enclosing-circle and geometric-median oracles
- homogeneity degrees, the bounding lemma, g-distance combinators

Usage:
    python scripts/reproduce_constants.py [--quick] [--seed N]

--quick divides every sample count by ten. Exit status is 1 if any check fails.
"""

import argparse
import math
import sys
import time
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.main import build_table  # noqa: E402
from app.models.domain import Config  # noqa: E402
from app.models.schemas import TableStatus  # noqa: E402
from app.services import elementary, fermat, gdistance, geometry  # noqa: E402
from app.services.core import simplex_ratio, verify_simplex  # noqa: E402
from app.services.registry import DISTANCE_NAMES, MIN_ARITY, make_distance  # noqa: E402
from app.services.spaces import ConfigSampler, Plane, stream  # noqa: E402
from lib import graph_lib  # noqa: E402

# full-scale configs per (distance, n); solver-backed distances get fewer
FUZZ_SAMPLES = {"fermat_euclidean": 10_000, "sec_radius": 20_000, "sec_area": 20_000}
FUZZ_DEFAULT_SAMPLES = 100_000


class Sweep:
    """Collects pass/fail lines."""

    def __init__(self, scale: int):
        self.scale = scale
        self.failed = []

    def count(self, full: int) -> int:
        return max(1, full // self.scale)

    def record(self, name: str, ok: bool, detail: str = "") -> None:
        mark = "✓" if ok else "✗"
        print(f"  {mark} {name}" + (f" ({detail})" if detail else ""))
        if not ok:
            self.failed.append(name)


def section(title: str) -> float:
    print(f"\n{title}")
    print("-" * 70)
    return time.time()


def done(start: float) -> None:
    print(f"  [{time.time() - start:.1f}s]")


def constants_table(sweep: Sweep, seed: int) -> None:
    start = section("1. Closed-form constants table")
    budget = sweep.count(10_000)
    rows = build_table(["drastic", "cardinality", "diameter", "sum", "arithmetic_mean", "sec_radius", "sec_area"],
                       range(2, 7), budget, seed)
    rows += build_table(["ap"], range(4, 7), budget, seed)
    for row in rows:
        sweep.record(f"{row.distance} n={row.n}", row.status == TableStatus.MATCH,
                     f"K*={row.theoretical_lo}, estimated {row.estimated}")
    done(start)


def simplex_fuzz(sweep: Sweep, seed: int) -> None:
    start = section("2. Simplex soundness fuzz")
    grid = graph_lib.grid_graph(3, 3)
    for name in DISTANCE_NAMES:
        samples = sweep.count(FUZZ_SAMPLES.get(name, FUZZ_DEFAULT_SAMPLES))
        for n in range(max(3, MIN_ARITY[name]), 7):
            if name == "fermat3_graph" and n != 3:
                continue
            d = make_distance(name, n, graph=grid)
            k = d.theoretical_k.hi
            violations = verify_simplex(d, k, samples=samples, seed=seed)
            sweep.record(f"{name} n={n} at K={k}", not violations, f"{samples} configs")
    done(start)


def fermat_sandwich(sweep: Sweep, seed: int) -> None:
    start = section("3. Fermat sandwich in the plane")
    samples = sweep.count(10_000)
    for n in range(3, 7):
        d = fermat.fermat_distance_euclidean(n)
        lo, _, refined = fermat.fermat_bounds(n)
        sampler = ConfigSampler(Plane(), n, tie_rate=0.0)
        worst, lowest_at_fermat = 0.0, math.inf
        for index in range(samples):
            c = sampler.sample_at(seed, index)
            worst = max(worst, float(simplex_ratio(d, c).ratio))
            if index % 10 == 0:
                point = fermat.weiszfeld(c.points).minimizer
                ratio = float(simplex_ratio(d, Config(points=c.points, pivot=point)).ratio)
                lowest_at_fermat = min(lowest_at_fermat, ratio)
        sweep.record(f"n={n} ratios <= {refined}", worst <= float(refined) + 1e-7, f"max {worst:.9f}")
        sweep.record(f"n={n} pivot at Fermat point >= {lo}", lowest_at_fermat >= float(lo) - 1e-7,
                     f"min {lowest_at_fermat:.9f}")
    done(start)


def median_graphs(sweep: Sweep, seed: int) -> None:
    start = section("4. Median graphs")
    rng = stream(seed, 40)
    graphs = [(f"tree #{k}", graph_lib.random_tree(int(rng.integers(2, 21)), rng)) for k in range(50)]
    graphs += [("3x3 grid", graph_lib.grid_graph(3, 3)), ("Q3", graph_lib.hypercube_graph(3))]
    bad = []
    for label, g in graphs:
        dm = fermat.bfs_all_pairs(g)
        table = fermat.fermat3_table(dm)
        formula = all(
            2 * table[u, v, w] == dm[u, v] + dm[u, w] + dm[v, w]
            for u, v, w in combinations(range(g.number_of_nodes()), 3)
        )
        best, _ = fermat.graph_best_constant(dm)
        if not (fermat.is_median_graph(g, dm) and formula and best == Fraction(1, 2)):
            bad.append(label)
    sweep.record("trees, grid, Q3: median, half-sum formula, K* = 1/2", not bad, ", ".join(bad))
    for label, g in (("K3", graph_lib.complete_graph(3)), ("K2,3", graph_lib.complete_bipartite_graph(2, 3))):
        sweep.record(f"{label} is not a median graph", not fermat.is_median_graph(g))
    done(start)


def direction_sandwich(sweep: Sweep, seed: int) -> None:
    start = section("5. Direction counts")
    samples = sweep.count(100_000)
    for n in (3, 4, 5):
        d = geometry.direction_distance(n)
        witness = simplex_ratio(d, d.witnesses[0]).ratio
        sweep.record(f"n={n} circle witness", witness == d.theoretical_k.lo, str(witness))
        sampler = d.sampler()
        worst = max(simplex_ratio(d, sampler.sample_at(seed, i)).ratio for i in range(samples))
        sweep.record(f"n={n} samples < {d.theoretical_k.hi}", worst < d.theoretical_k.hi, f"max {worst}")
    done(start)


def enclosing_circle_oracle(sweep: Sweep, seed: int) -> None:
    start = section("6. Enclosing circle against brute force")
    samples = sweep.count(10_000)
    mismatches = 0
    for index in range(samples):
        rng = stream(seed, 60, index)
        size = int(rng.integers(1, 9))
        pts = [tuple(int(c) for c in rng.integers(0, 10, size=2)) for _ in range(size)]
        fast = geometry.smallest_enclosing_circle(pts, seed=index)
        slow = geometry.brute_force_enclosing_circle(pts)
        if abs(float(fast.radius) - float(slow.radius)) > 1e-9:
            mismatches += 1
    sweep.record("randomized incremental == brute force", mismatches == 0, f"{samples} instances")
    done(start)


def _grid_search(points: np.ndarray, levels: int = 40) -> float:
    """Zooming grid search for min_y sum ||x_i - y|| (convex, so zooming is safe)."""
    center = points.mean(axis=0)
    half = float(np.ptp(points, axis=0).max()) or 1.0
    best = math.inf
    for _ in range(levels):
        axis = np.linspace(-half, half, 21)
        xs, ys = np.meshgrid(center[0] + axis, center[1] + axis)
        grid = np.stack([xs.ravel(), ys.ravel()], axis=1)
        values = np.linalg.norm(grid[:, None, :] - points[None, :, :], axis=2).sum(axis=1)
        k = int(np.argmin(values))
        best, center = min(best, float(values[k])), grid[k]
        half /= 3.0
    return best


def weiszfeld_oracle(sweep: Sweep, seed: int) -> None:
    start = section("7. Geometric median against grid search")
    worst = 0.0
    for index in range(sweep.count(100)):
        rng = stream(seed, 70, index)
        pts = rng.uniform(-1.0, 1.0, size=(int(rng.integers(1, 7)), 2))
        result = fermat.weiszfeld(pts)
        worst = max(worst, abs(result.value - _grid_search(pts)))
    sweep.record("weiszfeld == grid search", worst <= 1e-5, f"max gap {worst:.2e}")
    tri = fermat.weiszfeld([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)]).value
    square = fermat.weiszfeld([(0, 0), (1, 0), (1, 1), (0, 1)]).value
    sweep.record("equilateral triangle = sqrt(3)", abs(tri - math.sqrt(3)) <= 1e-7)
    sweep.record("unit square = 2 sqrt(2)", abs(square - 2 * math.sqrt(2)) <= 1e-7)
    done(start)


def homogeneity(sweep: Sweep, seed: int) -> None:
    start = section("8. Homogeneity degrees")
    for d, q in ((geometry.radius_distance(3), 1.0), (geometry.area_distance(3), 2.0),
                 (geometry.direction_distance(3), 0.0)):
        report = geometry.homogeneity_degree(d, samples=sweep.count(500), seed=seed)
        sweep.record(f"{d.name}: q = {q:g}", abs(report.degree - q) <= 1e-6, f"{report.degree:.9f}")
    done(start)


def bounding_and_two_point_area(sweep: Sweep, seed: int) -> None:
    start = section("9. Bounding lemma and two-point area")
    samples = sweep.count(100_000)
    lemma_bad = 0
    for index in range(samples):
        rng = stream(seed, 90, index)
        values = rng.exponential(1.0, size=int(rng.integers(1, 9)))
        a = float(rng.uniform(0.0, 1.0)) * float(values.sum())
        if a / (1 + a) > float((values / (1 + values)).sum()) + 1e-12:
            lemma_bad += 1
    sweep.record("a <= sum a_i implies a/(1+a) <= sum a_i/(1+a_i)", lemma_bad == 0, f"{samples} draws")

    d = geometry.area_distance(2, unsafe=True)
    sampler = ConfigSampler(Plane(), 2, tie_rate=0.0)
    worst = max(float(simplex_ratio(d, sampler.sample_at(seed, i)).ratio) for i in range(samples))
    sweep.record("two-point area ratio <= 2", worst <= 2.0 + 1e-9, f"max {worst:.9f}")
    done(start)


def g_distances(sweep: Sweep, seed: int) -> None:
    start = section("10. g-distance combinators")
    samples = sweep.count(10_000)
    half = gdistance.make_weighted_sum_g(Fraction(1, 2), 3)
    plain = gdistance.make_weighted_sum_g(1, 3)
    for factor in (Fraction(1, 2), 2, 10):
        d = elementary.scale(elementary.drastic(3), factor)
        sweep.record(f"scale by {factor} under {half.name}", gdistance.is_g_distance(d, half, samples=samples, seed=seed).passed)
    d = elementary.combine_add(elementary.drastic(3), elementary.cardinality(3))
    sweep.record(f"sum under {half.name}", gdistance.is_g_distance(d, half, samples=samples, seed=seed).passed)
    bounded = gdistance.bound_g_distance(elementary.diameter(3), plain, samples=samples, seed=seed)
    sweep.record("bounded diameter under sum", bounded.metadata["g_report"].passed)
    for lam in (0, Fraction(1, 3), 1, Fraction(5, 2)):
        holds, recovered = gdistance.check_additive_form(gdistance.make_weighted_sum_g(lam, 4), seed=seed)
        sweep.record(f"lambda = {lam} recovered", holds and recovered == lam)
    for g in (plain, gdistance.make_scaled_min_g(3)):
        sweep.record(f"{g.name} concave", gdistance.check_concavity(g, samples=samples, seed=seed).holds)
    done(start)


SWEEPS = (constants_table, simplex_fuzz, fermat_sandwich, median_graphs, direction_sandwich,
          enclosing_circle_oracle, weiszfeld_oracle, homogeneity, bounding_and_two_point_area, g_distances)


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the best-constant reproduction sweeps")
    parser.add_argument("--quick", action="store_true", help="one tenth of the sample counts")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    print("=" * 70)
    print("N-DISTANCE BEST-CONSTANT REPRODUCTION")
    print("=" * 70)
    print(f"\nSeed: {args.seed}")
    print(f"Sample counts: {'1/10 (quick)' if args.quick else 'full'}")

    sweep = Sweep(scale=10 if args.quick else 1)
    started = time.time()
    for run in SWEEPS:
        run(sweep, args.seed)

    print("\n" + "=" * 70)
    print("SWEEPS COMPLETE")
    print("=" * 70)
    print(f"\nTotal time: {time.time() - started:.1f}s")
    if sweep.failed:
        print(f"\n✗ {len(sweep.failed)} checks failed:")
        for name in sweep.failed:
            print(f"  {name}")
        return 1
    print("\n✓ All checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
