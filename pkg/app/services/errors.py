"""
Exceptions raised by the n-distance services.

Checks whose failures are data (axiom sampling, property sampling) never raise;
these exceptions cover bad input and states where no answer can be given.
"""

from typing import Any, Optional, Sequence


class NDistanceError(Exception):
    """Base class for every error raised by the services."""


class ArgumentError(NDistanceError, ValueError):
    """An argument is outside its documented domain."""


class ConfigurationError(NDistanceError):
    """A distance, combinator or run was configured inconsistently."""


class PreconditionError(ConfigurationError):
    """An operation's mathematical precondition does not hold."""


class ParseError(NDistanceError):
    """An input file could not be parsed."""


class DegenerateInputError(NDistanceError):
    """Every sampled value was degenerate (for example all zero)."""


class GraphStructureError(NDistanceError):
    """The graph is not connected, or is not a simple graph."""


class AxiomViolationError(NDistanceError):
    """
    A configuration refutes the n-distance axioms outright.

    Raised when the left side of the simplex inequality is positive while every
    replaced tuple evaluates to zero: no finite constant can hold there.
    """

    def __init__(self, message: str, config: Any = None):
        super().__init__(message)
        self.config = config


class EvaluationError(NDistanceError):
    """A distance could not be evaluated on a configuration."""

    def __init__(self, message: str, config: Any = None):
        super().__init__(message)
        self.config = config


class NotMedianError(NDistanceError):
    """A vertex triple has zero or several medians."""

    def __init__(self, triple: Sequence[int], candidates: Optional[Sequence[int]] = None):
        candidates = list(candidates or [])
        super().__init__(
            f"triple {tuple(triple)} has {len(candidates)} medians {candidates}"
        )
        self.triple = tuple(triple)
        self.candidates = candidates
