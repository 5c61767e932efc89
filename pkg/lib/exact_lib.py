#!/usr/bin/env python3
"""
Exact-number helpers.

Integer-valued distances and rational inputs are carried as ``int`` /
``fractions.Fraction`` so the best constants compare exactly; everything else
is a float. These helpers parse, classify and render both kinds.
"""

import math
import numbers
from fractions import Fraction
from typing import Any, Iterable, Union

Number = Union[int, Fraction, float]


def is_exact(value: Any) -> bool:
    """True for ints and Fractions (bools excluded)."""
    if isinstance(value, (bool, float)):
        return False
    return isinstance(value, (int, Fraction)) or isinstance(value, numbers.Rational)


def all_exact(values: Iterable[Any]) -> bool:
    return all(is_exact(v) for v in values)


def exact_div(numerator: Number, denominator: Number) -> Number:
    """Divide, staying in Fractions when both sides are exact."""
    if is_exact(numerator) and is_exact(denominator):
        return Fraction(numerator) / Fraction(denominator)
    return float(numerator) / float(denominator)


def normalize(value: Number) -> Number:
    """Collapse integral Fractions to int; leave floats alone."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return int(value.numerator)
    return value


def parse_number(text: str) -> Number:
    """
    Parse a literal from a points file or flag.

    ``"3"`` → 3, ``"-2/7"`` → Fraction(-2, 7), ``"0.25"`` → 0.25.

    Raises:
        ValueError: unparseable or non-finite literal
    """
    text = text.strip()
    if not text:
        raise ValueError("empty number literal")
    if "/" in text:
        num, den = text.split("/", 1)
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return normalize(Fraction(int(num), int(den)))
    try:
        return int(text)
    except ValueError:
        pass
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"non-finite literal {text!r}")
    return value


def format_number(value: Any) -> str:
    """Render exact values as p/q and floats with 17 significant digits."""
    if isinstance(value, bool):
        return str(value)
    if is_exact(value):
        q = Fraction(value)
        if q.denominator == 1:
            return str(q.numerator)
        return f"{q.numerator}/{q.denominator}"
    return format(float(value), ".17g")


def to_json_value(value: Any) -> Any:
    """JSON-ready form: int stays int, Fraction becomes "p/q", float stays float."""
    if isinstance(value, (tuple, list)):
        return [to_json_value(v) for v in value]
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if is_exact(value):
        q = Fraction(value)
        if q.denominator == 1:
            return int(q.numerator)
        return f"{q.numerator}/{q.denominator}"
    if isinstance(value, numbers.Integral):
        return int(value)
    return float(value)


def from_json_value(value: Any) -> Any:
    """Inverse of to_json_value."""
    if isinstance(value, list):
        return tuple(from_json_value(v) for v in value)
    if isinstance(value, str):
        return parse_number(value)
    return value
