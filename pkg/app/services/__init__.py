"""
Services module - n-distances and the checks run on them.
"""

from .core import (
    NDistance,
    estimate_best_constant,
    eval_replaced,
    simplex_ratio,
    verify_axioms,
    verify_simplex,
)
from .errors import NDistanceError
from .registry import DISTANCE_NAMES, make_distance

__all__ = [
    "NDistance",
    "estimate_best_constant",
    "eval_replaced",
    "simplex_ratio",
    "verify_axioms",
    "verify_simplex",
    "NDistanceError",
    "DISTANCE_NAMES",
    "make_distance",
]
