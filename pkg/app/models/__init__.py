"""
Models module - value types and pydantic report schemas.
"""

from .domain import (
    Circle,
    Config,
    Direction,
    RatioSample,
    SimplexViolation,
    TheoreticalK,
    WeiszfeldResult,
)
from .schemas import (
    AxiomFailure,
    AxiomReport,
    EstimateReport,
    GDistanceReport,
    GPropertyReport,
    HomogeneityReport,
    OptimizerSettings,
    RunConfig,
    TableRow,
    TableStatus,
)

__all__ = [
    "Circle",
    "Config",
    "Direction",
    "RatioSample",
    "SimplexViolation",
    "TheoreticalK",
    "WeiszfeldResult",
    "AxiomFailure",
    "AxiomReport",
    "EstimateReport",
    "GDistanceReport",
    "GPropertyReport",
    "HomogeneityReport",
    "OptimizerSettings",
    "RunConfig",
    "TableRow",
    "TableStatus",
]
