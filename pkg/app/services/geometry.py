"""
Planar geometry n-distances.

Smallest enclosing circles back the radius and area n-distances; counting the
distinct directions spanned by a point set gives a third, dilation-invariant
one. ``homogeneity_degree`` measures how a planar distance scales.
"""

import math
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.models.domain import Circle, Config, Direction, Point2, TheoreticalK
from app.models.schemas import HomogeneityReport
from app.services.core import NDistance
from app.services.errors import ArgumentError, ConfigurationError, DegenerateInputError
from app.services.spaces import SEC_STREAM, ConfigSampler, IntegerPlane, Plane, Space, stream
from app.utils.logging import get_logger
from lib import enclosing_circle_lib as sec
from lib.exact_lib import all_exact, is_exact, parse_number

logger = get_logger(__name__)


def _validate_points(points: Sequence[Point2]) -> List[Point2]:
    checked = []
    for p in points:
        if len(p) != 2:
            raise ArgumentError(f"expected planar points, got {p!r}")
        for c in p:
            if not is_exact(c) and not math.isfinite(float(c)):
                raise ArgumentError(f"non-finite coordinate in {p!r}")
        checked.append(tuple(p))
    return checked


def smallest_enclosing_circle(points: Sequence[Point2], seed: Optional[int] = None) -> Circle:
    """
    The unique smallest circle enclosing ``points``.

    Duplicates are merged first; with a seed the processing order is a
    seeded shuffle, so identical seeds give identical support sets.

    Raises:
        ArgumentError: empty input or non-finite coordinates
    """
    pts = _validate_points(points)
    if not pts:
        raise ArgumentError("smallest_enclosing_circle needs at least one point")
    order = None
    if seed is not None:
        order = [int(k) for k in stream(seed, SEC_STREAM).permutation(sec.unique_count(pts))]
    center, radius_sq, support = sec.make_circle(pts, order)
    return Circle(center=center, radius_sq=radius_sq, support=support)


def brute_force_enclosing_circle(points: Sequence[Point2]) -> Circle:
    """Minimum over all circles through 1, 2 or 3 of the points (test oracle)."""
    pts = _validate_points(points)
    if not pts:
        raise ArgumentError("brute_force_enclosing_circle needs at least one point")
    center, radius_sq, support = sec.brute_force_circle(pts)
    return Circle(center=center, radius_sq=radius_sq, support=support)


def circumradius_law_of_sines(a: float, b: float, c: float) -> float:
    return sec.circumradius_law_of_sines(a, b, c)


def _plane_for(exact: bool) -> Space:
    return IntegerPlane() if exact else Plane()


def radius_distance(n: int, space: Optional[Space] = None) -> NDistance:
    """Radius of the smallest enclosing circle; K* = 1/(n-1)."""
    if n < 2:
        raise ConfigurationError("radius distance needs n >= 2")
    one, zero = Fraction(1), Fraction(0)
    witness = Config(points=((one, zero),) + ((zero, zero),) * (n - 1), pivot=(zero, zero))
    return NDistance(
        name="sec_radius",
        arity=n,
        space=space or Plane(),
        evaluate=lambda pts: smallest_enclosing_circle(pts).radius,
        theoretical_k=TheoreticalK.exact_value(Fraction(1, n - 1), "radius of the enclosing circle"),
        witnesses=(witness,),
    )


def area_distance(n: int, space: Optional[Space] = None, unsafe: bool = False) -> NDistance:
    """
    Area of the smallest enclosing circle; K* = 1/(n - 3/2) for n >= 3.

    At n = 2 the map fails the simplex inequality with K = 1; it can still be
    built with ``unsafe=True`` for studying that case.
    """
    if n < 2 or (n == 2 and not unsafe):
        raise ConfigurationError("area distance is an n-distance only for n >= 3")

    def evaluate(pts):
        return math.pi * float(smallest_enclosing_circle(pts).radius_sq)

    if n == 2:
        return NDistance(name="sec_area", arity=2, space=space or Plane(), evaluate=evaluate,
                         metadata={"unsafe": True})

    zero, two = Fraction(0), Fraction(2)
    midpoint = (Fraction(1), zero)
    witness = Config(points=((zero, zero), (two, zero)) + (midpoint,) * (n - 2), pivot=midpoint)
    return NDistance(
        name="sec_area",
        arity=n,
        space=space or Plane(),
        evaluate=evaluate,
        theoretical_k=TheoreticalK.exact_value(1 / (Fraction(n) - Fraction(3, 2)), "area of the enclosing circle"),
        witnesses=(witness,),
    )


def direction_of(p: Point2, q: Point2) -> Direction:
    """
    Direction of the segment pq, identified with that of qp.

    Raises:
        ArgumentError: p == q
    """
    dx, dy = p[0] - q[0], p[1] - q[1]
    if dx == 0 and dy == 0:
        raise ArgumentError("coincident points have no direction")
    if all_exact((dx, dy)):
        fx, fy = Fraction(dx), Fraction(dy)
        scale = fx.denominator * fy.denominator // math.gcd(fx.denominator, fy.denominator)
        ix, iy = int(fx * scale), int(fy * scale)
        g = math.gcd(abs(ix), abs(iy))
        ix, iy = ix // g, iy // g
        if ix < 0 or (ix == 0 and iy < 0):
            ix, iy = -ix, -iy
        return Direction(key=(ix, iy), exact=True)
    angle = math.atan2(float(dy), float(dx)) % math.pi
    return Direction(key=angle, exact=False)


def _count_angles(angles: List[float], tol: float) -> int:
    if not angles:
        return 0
    angles.sort()
    count = 1
    for prev, cur in zip(angles, angles[1:]):
        if cur - prev > tol:
            count += 1
    # angles near pi and near 0 are the same direction
    if count > 1 and angles[0] + math.pi - angles[-1] <= tol:
        count -= 1
    return count


def direction_count(points: Sequence[Point2], angle_tol: float = None) -> int:
    """
    Number of distinct directions over all pairs of distinct points.

    Exact coordinates compare reduced integer pairs; float coordinates bucket
    angles in [0, pi) with tolerance ``angle_tol``.
    """
    pts = _validate_points(points)
    if not pts:
        raise ArgumentError("direction_count needs at least one point")
    angle_tol = settings.direction_angle_tolerance if angle_tol is None else angle_tol
    exact_keys = set()
    angles: List[float] = []
    for p, q in combinations(dict.fromkeys(pts), 2):
        direction = direction_of(p, q)
        if direction.exact:
            exact_keys.add(direction.key)
        else:
            angles.append(direction.key)
    if angles and exact_keys:
        angles.extend(math.atan2(iy, ix) % math.pi for ix, iy in exact_keys)
        return _count_angles(angles, angle_tol)
    return len(exact_keys) + _count_angles(angles, angle_tol)


def _rational_circle_point(t: Fraction) -> Tuple[Fraction, Fraction]:
    denom = 1 + t * t
    return ((1 - t * t) / denom, 2 * t / denom)


def direction_witness(n: int) -> Tuple[Tuple[Fraction, Fraction], ...]:
    """
    n rational points on the unit circle with no two parallel chords.

    Points come from the parametrization ((1-t^2)/(1+t^2), 2t/(1+t^2)) over
    t = 1/2, 2/3, 3/4, ... shifted by irregular offsets; a candidate is kept
    only if its direction count is exactly C(n, 2).
    """
    if n < 2:
        raise ArgumentError("direction witness needs n >= 2")
    target = n * (n - 1) // 2
    for shift in range(1, 200):
        params = [Fraction(k * k + shift, 2 * k * k + 3 * k + shift + 1) for k in range(1, n + 1)]
        pts = tuple(_rational_circle_point(t) for t in params)
        if len(set(pts)) == n and direction_count(pts) == target:
            return pts
    raise ArgumentError(f"no generic circle configuration found for n={n}")


def direction_distance(n: int, space: Optional[Space] = None) -> NDistance:
    """Number of directions; 1/(n-2+2/n) <= K* < 1/(n-2)."""
    if n < 3:
        raise ConfigurationError("direction distance needs n >= 3")
    pts = direction_witness(n)
    return NDistance(
        name="directions",
        arity=n,
        space=space or IntegerPlane(),
        evaluate=direction_count,
        theoretical_k=TheoreticalK(
            lo=1 / (Fraction(n - 2) + Fraction(2, n)),
            hi=Fraction(1, n - 2),
            hi_exclusive=True,
            source="number of directions",
        ),
        witnesses=(Config(points=pts, pivot=pts[0]),),
    )


def homogeneity_degree(
    d: NDistance,
    sampler: Optional[ConfigSampler] = None,
    scales: Sequence[float] = (0.5, 2.0, 3.0, 10.0),
    samples: int = 50,
    seed: int = None,
) -> HomogeneityReport:
    """
    Estimate q in d(t x) = t^q d(x).

    Per sampled tuple with d > 0, fits the least-squares slope of log d(t x)
    against log t (t = 1 included); q is the mean slope.

    Raises:
        ArgumentError: nonpositive scale
        DegenerateInputError: every sampled value was zero
    """
    if any(t <= 0 for t in scales):
        raise ArgumentError("scales must be positive")
    seed = settings.seed if seed is None else seed
    sampler = sampler or ConfigSampler(Plane(), d.arity, tie_rate=0.0)
    ts = [1.0] + [float(t) for t in scales if float(t) != 1.0]
    log_t = np.log(ts)

    slopes, residuals = [], []
    for index in range(samples):
        points = sampler.sample_at(seed, index).points
        values = [float(d(tuple(sampler.space.dilate(p, t) for p in points))) for t in ts]
        if min(values) <= 0:
            continue
        slope, intercept = np.polyfit(log_t, np.log(values), 1)
        fitted = slope * log_t + intercept
        slopes.append(float(slope))
        residuals.append(float(np.max(np.abs(np.log(values) - fitted))))

    if not slopes:
        raise DegenerateInputError(f"{d.name}: every sampled value was zero")
    degree = float(np.mean(slopes))
    logger.info("homogeneity %s: q=%.9f over %d samples", d.name, degree, len(slopes))
    return HomogeneityReport(
        distance=d.name,
        degree=degree,
        samples_used=len(slopes),
        scales=ts,
        slopes=slopes,
        residuals=residuals,
    )


def read_points_file(path: str) -> List[Point2]:
    """
    Read a CSV points file with header ``x,y``; decimal or ``p/q`` literals.

    Raises:
        ParseError: missing header, bad row or empty file
    """
    import csv

    from app.services.errors import ParseError

    try:
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows or [cell.strip().lower() for cell in rows[0]] != ["x", "y"]:
        raise ParseError(f"{path}: expected header 'x,y'")
    points = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ParseError(f"{path}:{lineno}: expected two columns")
        try:
            points.append((parse_number(row[0]), parse_number(row[1])))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    if not points:
        raise ParseError(f"{path}: no points")
    return points
