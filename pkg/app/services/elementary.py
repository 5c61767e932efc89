"""
Elementary n-distances and the constructions that preserve them.

Every distance built here carries its known best constant and an exact
witness config, so the estimator can confirm the constant in rational
arithmetic.
"""

import math
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Optional, Sequence, Tuple

from app.models.domain import Config, TheoreticalK
from app.services.core import NDistance
from app.services.errors import ArgumentError, ConfigurationError
from app.services.spaces import IntegerLine, LabelSpace, RealLine, Space
from lib.exact_lib import Number, exact_div, is_exact, normalize

Metric = Callable[[Any, Any], Number]


def euclidean(a: Sequence[Number], b: Sequence[Number]) -> float:
    return math.dist(a, b)


def absolute_difference(a: Number, b: Number) -> Number:
    return abs(a - b)


def _require_arity(name: str, n: int, minimum: int = 2) -> None:
    if n < minimum:
        raise ConfigurationError(f"{name} needs n >= {minimum}, got {n}")


def _one_over(n: int) -> TheoreticalK:
    return TheoreticalK.exact_value(Fraction(1, n - 1), "1/(n-1)")


def _lopsided_witness(n: int, origin: Any = 0, unit: Any = 1) -> Config:
    """x_1 = ... = x_{n-1} = z = origin and x_n = unit."""
    return Config(points=(origin,) * (n - 1) + (unit,), pivot=origin)


def drastic(n: int, space: Optional[Space] = None) -> NDistance:
    """0 on constant tuples, 1 otherwise."""
    _require_arity("drastic", n)
    return NDistance(
        name="drastic",
        arity=n,
        space=space or LabelSpace(),
        evaluate=lambda pts: 0 if all(p == pts[0] for p in pts) else 1,
        theoretical_k=_one_over(n),
        witnesses=(_lopsided_witness(n),),
    )


def cardinality(n: int, space: Optional[Space] = None) -> NDistance:
    """Number of distinct entries minus one."""
    _require_arity("cardinality", n)
    return NDistance(
        name="cardinality",
        arity=n,
        space=space or LabelSpace(),
        evaluate=lambda pts: len(set(pts)) - 1,
        theoretical_k=_one_over(n),
        witnesses=(Config(points=tuple(range(n)), pivot=0),),
    )


def diameter(
    n: int,
    base: Metric = absolute_difference,
    space: Optional[Space] = None,
    anchors: Tuple[Any, Any] = (0, 1),
) -> NDistance:
    """Largest pairwise base distance; ``anchors`` are two points at base distance > 0 for the witness."""
    _require_arity("diameter", n)

    def evaluate(pts):
        return max(base(a, b) for a, b in combinations(pts, 2))

    return NDistance(
        name="diameter",
        arity=n,
        space=space or RealLine(),
        evaluate=evaluate,
        theoretical_k=_one_over(n),
        witnesses=(_lopsided_witness(n, *anchors),),
    )


def sum_pairwise(
    n: int,
    base: Metric = absolute_difference,
    space: Optional[Space] = None,
    anchors: Tuple[Any, Any] = (0, 1),
) -> NDistance:
    """Sum of the base distance over unordered pairs."""
    _require_arity("sum", n)

    def evaluate(pts):
        terms = [base(a, b) for a, b in combinations(pts, 2)]
        return sum(terms[1:], terms[0])

    return NDistance(
        name="sum",
        arity=n,
        space=space or RealLine(),
        evaluate=evaluate,
        theoretical_k=_one_over(n),
        witnesses=(_lopsided_witness(n, *anchors),),
    )


def _mean_minus_min(pts: Sequence[Number]) -> Number:
    # each offset is >= 0, so the mean of them is too
    low = min(pts)
    offsets = [x - low for x in pts]
    return exact_div(sum(offsets[1:], offsets[0]), len(pts))


def arithmetic_mean(n: int, space: Optional[Space] = None) -> NDistance:
    """Mean of the entries minus the smallest entry."""
    _require_arity("arithmetic_mean", n)
    # x_1 < z < x_2 = ... = x_n
    witness = Config(points=(0,) + (2,) * (n - 1), pivot=1)
    return NDistance(
        name="arithmetic_mean",
        arity=n,
        space=space or RealLine(),
        evaluate=lambda pts: normalize(_mean_minus_min(pts)),
        theoretical_k=_one_over(n),
        witnesses=(witness,),
    )


def is_progression(values: Sequence[Number]) -> bool:
    """
    True when the sorted entries form an arithmetic progression with a
    nonzero common difference.

    Exact entries compare exactly; floats are compared after conversion to
    Fractions, so only genuinely equal steps count.
    """
    ordered = sorted(Fraction(v) for v in values)
    step = ordered[1] - ordered[0]
    if step == 0:
        return False
    return all(b - a == step for a, b in zip(ordered, ordered[1:]))


def ap_distance(n: int, space: Optional[Space] = None) -> NDistance:
    """
    0 on constant tuples, 1 on arithmetic progressions, 1/n otherwise.

    Membership ignores the order of the entries, which keeps the map
    symmetric.
    """
    _require_arity("ap", n, minimum=3)
    small = Fraction(1, n)

    def evaluate(pts):
        if all(p == pts[0] for p in pts):
            return 0
        return 1 if is_progression(pts) else small

    return NDistance(
        name="ap",
        arity=n,
        space=space or IntegerLine(),
        evaluate=evaluate,
        theoretical_k=TheoreticalK.exact_value(Fraction(1), "progression distance"),
        witnesses=(Config(points=tuple(range(1, n + 1)), pivot=-1),),
    )


def to_hemimetric(d: NDistance) -> NDistance:
    """d on tuples of pairwise distinct entries, 0 as soon as two entries coincide."""

    def evaluate(pts):
        seen = set()
        for p in pts:
            if p in seen:
                return 0
            seen.add(p)
        return d(pts)

    return NDistance(
        name=f"hemi({d.name})",
        arity=d.arity,
        space=d.space,
        evaluate=evaluate,
        zero_rule="repeated",
        metadata={"base": d.name},
    )


def _require_compatible(d: NDistance, other: NDistance) -> None:
    if d.arity != other.arity:
        raise ConfigurationError(f"arity mismatch: {d.name} is {d.arity}-ary, {other.name} is {other.arity}-ary")
    if d.space != other.space:
        raise ConfigurationError(f"space mismatch: {d.name} on {d.space.tag}, {other.name} on {other.space.tag}")


def combine_add(d: NDistance, other: NDistance) -> NDistance:
    """Pointwise sum; an n-distance plus a hemimetric is again an n-distance."""
    _require_compatible(d, other)
    zero_rule = "repeated" if d.zero_rule == other.zero_rule == "repeated" else "constant"
    return NDistance(
        name=f"add({d.name},{other.name})",
        arity=d.arity,
        space=d.space,
        evaluate=lambda pts: d(pts) + other(pts),
        zero_rule=zero_rule,
    )


def scale(d: NDistance, factor: Number) -> NDistance:
    """lambda * d; the best constant and the witnesses carry over unchanged."""
    if not factor > 0:
        raise ArgumentError(f"scale factor must be positive, got {factor}")
    if isinstance(factor, float) and factor.is_integer():
        factor = int(factor)
    return NDistance(
        name=f"scale({d.name},{factor})",
        arity=d.arity,
        space=d.space,
        evaluate=lambda pts: normalize(factor * d(pts)) if is_exact(factor) else factor * d(pts),
        theoretical_k=d.theoretical_k,
        witnesses=d.witnesses,
        zero_rule=d.zero_rule,
    )


def bound(d: NDistance) -> NDistance:
    """x -> d(x) / (1 + d(x)), an n-distance with values in [0, 1)."""

    def evaluate(pts):
        value = d(pts)
        return normalize(exact_div(value, 1 + value)) if is_exact(value) else value / (1.0 + value)

    return NDistance(
        name=f"bound({d.name})",
        arity=d.arity,
        space=d.space,
        evaluate=evaluate,
        zero_rule=d.zero_rule,
    )
