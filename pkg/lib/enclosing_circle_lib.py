#!/usr/bin/env python3
"""
Smallest Enclosing Circle Library

Randomized incremental construction of the smallest circle enclosing a planar
point set (expected linear time), with move-to-front of every point that
forces a rebuild. Exactness is decided once per call: all-integer/Fraction
coordinates give an exact center and an exact squared radius; anything else is
converted to float up front and uses a small relative slack in the
containment test.

Circles are plain tuples ``(center, radius_sq, support)`` so this module stays
independent of the application models.
"""

import itertools
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from lib.exact_lib import is_exact

Point = Tuple
RawCircle = Tuple[Point, object, Tuple[Point, ...]]

# relative slack for float containment
MULTIPLICATIVE_EPSILON = 1e-12


def _prepare(points: Sequence[Point]) -> Tuple[List[Point], bool]:
    """Deduplicated points and whether every coordinate is exact."""
    unique: List[Point] = list(dict.fromkeys(tuple(p) for p in points))
    exact = all(is_exact(c) for p in unique for c in p)
    if not exact:
        unique = list(dict.fromkeys((float(p[0]), float(p[1])) for p in unique))
    return unique, exact


def _half(value, exact: bool):
    return Fraction(value) / 2 if exact else value / 2.0


def _div(a, b, exact: bool):
    if exact:
        return Fraction(a) / Fraction(b)
    return a / b


def dist_sq(a: Point, b: Point):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def contains(circle: RawCircle, p: Point, exact: bool) -> bool:
    center, radius_sq, _ = circle
    d2 = dist_sq(center, p)
    if exact:
        return d2 <= radius_sq
    return d2 <= radius_sq * (1 + MULTIPLICATIVE_EPSILON) + 1e-300


def circle_one(a: Point) -> RawCircle:
    return (tuple(a), 0, (tuple(a),))


def circle_two(a: Point, b: Point, exact: bool) -> RawCircle:
    center = (_half(a[0] + b[0], exact), _half(a[1] + b[1], exact))
    radius_sq = max(dist_sq(center, a), dist_sq(center, b))
    return (center, radius_sq, (tuple(a), tuple(b)))


def circumcircle(a: Point, b: Point, c: Point, exact: bool) -> Optional[RawCircle]:
    """Circle through three points; None when they are collinear."""
    # translate for float stability
    if exact:
        ox = oy = 0
    else:
        ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
        oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2
    if d == 0:
        return None
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    x = ox + _div(a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by), d, exact)
    y = oy + _div(a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax), d, exact)
    center = (x, y)
    radius_sq = max(dist_sq(center, a), dist_sq(center, b), dist_sq(center, c))
    return (center, radius_sq, (tuple(a), tuple(b), tuple(c)))


def _widest_pair(a: Point, b: Point, c: Point, exact: bool) -> RawCircle:
    pairs = [(a, b), (a, c), (b, c)]
    return max((circle_two(p, q, exact) for p, q in pairs), key=lambda circ: circ[1])


def _circle_with_two(points: Sequence[Point], p: Point, q: Point, exact: bool) -> RawCircle:
    circ = circle_two(p, q, exact)
    for r in points:
        if not contains(circ, r, exact):
            circ = circumcircle(p, q, r, exact) or _widest_pair(p, q, r, exact)
    return circ


def _circle_with_one(points: Sequence[Point], p: Point, exact: bool) -> RawCircle:
    circ = circle_one(p)
    for j, q in enumerate(points):
        if not contains(circ, q, exact):
            circ = _circle_with_two(points[:j], p, q, exact)
    return circ


def make_circle(points: Sequence[Point], order: Optional[Sequence[int]] = None) -> RawCircle:
    """
    Smallest enclosing circle of ``points``.

    Args:
        points: nonempty sequence of 2-tuples
        order: optional processing order (a permutation of the deduplicated
            points, e.g. drawn from a seeded generator)

    Returns:
        (center, radius_sq, support) with at most three support points

    Raises:
        ValueError: empty input
    """
    unique, exact = _prepare(points)
    if not unique:
        raise ValueError("cannot enclose an empty point set")
    if order is not None:
        unique = [unique[k] for k in order]

    circ = None
    for i in range(len(unique)):
        p = unique[i]
        if circ is None or not contains(circ, p, exact):
            circ = _circle_with_one(unique[:i], p, exact)
            # move-to-front
            unique.insert(0, unique.pop(i))
    return circ


def unique_count(points: Sequence[Point]) -> int:
    return len(_prepare(points)[0])


def brute_force_circle(points: Sequence[Point]) -> RawCircle:
    """
    Minimum over every circle determined by 1, 2 or 3 of the points that
    encloses them all. Cubic; meant as a test oracle for small inputs.
    """
    unique, exact = _prepare(points)
    if not unique:
        raise ValueError("cannot enclose an empty point set")
    if len(unique) == 1:
        return circle_one(unique[0])
    best = None
    candidates = [circle_two(a, b, exact) for a, b in itertools.combinations(unique, 2)]
    candidates += [c for c in (circumcircle(*t, exact) for t in itertools.combinations(unique, 3)) if c]
    for circ in candidates:
        if all(contains(circ, p, exact) for p in unique):
            if best is None or circ[1] < best[1]:
                best = circ
    return best


def circumradius_law_of_sines(a: float, b: float, c: float) -> float:
    """Circumradius of a triangle with sides a, b, c: R = a / (2 sin alpha)."""
    cos_alpha = (b * b + c * c - a * a) / (2.0 * b * c)
    sin_alpha = math.sqrt(max(0.0, 1.0 - cos_alpha * cos_alpha))
    return a / (2.0 * sin_alpha)
