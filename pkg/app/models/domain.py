"""
In-memory value types.

These carry exact ``int``/``Fraction`` values through the hot paths, so they
are frozen dataclasses rather than pydantic models; ``schemas.py`` holds the
serialized forms.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional, Tuple, Union

import numpy as np

from lib.exact_lib import Number, is_exact, normalize, to_json_value
from lib.weiszfeld_lib import WeiszfeldResult  # re-exported

Point2 = Tuple[Number, Number]


@dataclass(frozen=True)
class Config:
    """One instance of the simplex inequality: points x_1..x_n and the pivot z."""

    points: Tuple[Any, ...]
    pivot: Any

    @property
    def arity(self) -> int:
        return len(self.points)

    def replaced(self, i: int) -> Tuple[Any, ...]:
        """The tuple with entry ``i`` (0-based) replaced by the pivot."""
        return self.points[:i] + (self.pivot,) + self.points[i + 1:]

    def to_json(self) -> dict:
        return {"points": to_json_value(self.points), "pivot": to_json_value(self.pivot)}


@dataclass(frozen=True)
class RatioSample:
    """Both sides of the simplex inequality at one config."""

    config: Config
    numerator: Number
    denominator: Number
    ratio: Number


@dataclass(frozen=True)
class SimplexViolation:
    """A config where ``lhs > k_tested * denominator`` by more than the tolerance."""

    config: Config
    k_tested: Number
    lhs: Number
    rhs: Number
    excess: Number


@dataclass(frozen=True)
class Circle:
    """Smallest enclosing circle; ``radius_sq`` is exact for rational input."""

    center: Point2
    radius_sq: Number
    support: Tuple[Point2, ...] = ()

    @property
    def radius(self) -> Number:
        """Exact when radius_sq is the square of a rational, float otherwise."""
        if is_exact(self.radius_sq):
            return _fraction_sqrt(Fraction(self.radius_sq))
        return float(np.sqrt(float(self.radius_sq)))


def _fraction_sqrt(q: Fraction) -> Number:
    num, den = q.numerator, q.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is not None and rd is not None:
        return normalize(Fraction(rn, rd))
    return float(np.sqrt(float(q)))


def _isqrt_exact(value: int) -> Optional[int]:
    root = math.isqrt(value)
    return root if root * root == value else None


@dataclass(frozen=True)
class Direction:
    """
    Orientation of a segment, identified with its reverse.

    Exact input gives a reduced integer pair (p, q) with p > 0, or p = 0 and q > 0.
    Float input gives an angle bucket in [0, pi).
    """

    key: Union[Tuple[int, int], float]
    exact: bool = True


@dataclass(frozen=True)
class TheoreticalK:
    """
    Known best constant: a single value (lo == hi) or an interval.

    ``hi_exclusive`` marks a strict upper bound that is never attained.
    """

    lo: Number
    hi: Number
    hi_exclusive: bool = False
    source: str = ""

    @classmethod
    def exact_value(cls, value: Number, source: str = "") -> "TheoreticalK":
        return cls(lo=value, hi=value, source=source)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi and not self.hi_exclusive

    def admits(self, ratio: Number, tolerance: Number = 0) -> bool:
        """True when ``ratio`` does not exceed the upper value."""
        if self.hi_exclusive:
            return ratio < self.hi + tolerance if tolerance else ratio < self.hi
        return ratio <= self.hi + tolerance

    def to_json(self) -> dict:
        if self.is_exact:
            return {"exact": to_json_value(self.lo)}
        payload = {"interval": [to_json_value(self.lo), to_json_value(self.hi)]}
        if self.hi_exclusive:
            payload["upper_exclusive"] = True
        return payload
