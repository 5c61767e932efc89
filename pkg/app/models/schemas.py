"""
Pydantic schemas for reports and run configuration.
"""

from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.models.domain import Config
from lib.exact_lib import format_number, to_json_value


class TableStatus(str, Enum):
    """Outcome of comparing an estimate with the theoretical constant."""
    MATCH = "match"
    WITHIN_BOUNDS = "within-bounds"
    VIOLATION = "VIOLATION"


# Optimizer

class OptimizerSettings(BaseModel):
    """Hill-climb refinement settings for the best-constant search."""
    starts: int = Field(default_factory=lambda: settings.refine_starts, ge=0, description="Number of refined starts")
    steps: int = Field(default_factory=lambda: settings.refine_steps, ge=0, description="Steps per start")
    patience: int = Field(default_factory=lambda: settings.refine_patience, ge=1, description="Failures before halving the step")
    initial_step: float = Field(default_factory=lambda: settings.refine_initial_step, gt=0.0, description="Initial relative step")


# Axiom checks

class AxiomFailure(BaseModel):
    """One counterexample to an n-distance condition."""
    condition: Literal["nonnegative", "symmetry", "identity", "simplex"] = Field(..., description="Condition refuted")
    points: List[Any] = Field(default_factory=list, description="Tuple that refutes it")
    pivot: Optional[Any] = Field(default=None, description="Pivot, for simplex failures")
    detail: str = Field(default="", description="Human-readable explanation")


class AxiomReport(BaseModel):
    """Result of sampling the axioms of an n-distance."""
    distance: str
    arity: int
    samples: int
    seed: int
    passed: bool
    checked: Dict[str, int] = Field(default_factory=dict, description="Checks run per condition")
    failures: List[AxiomFailure] = Field(default_factory=list)

    def failed_conditions(self) -> set:
        return {failure.condition for failure in self.failures}


# Best constant

class EstimateReport(BaseModel):
    """Result of the best-constant search; ratios keep their exact type."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    distance_name: str
    arity: int
    budget: int
    seed: int
    best_ratio: Any = Field(..., description="Empirical lower bound on the best constant")
    witness: Config = Field(..., description="Config achieving best_ratio")
    sampled_ratio: Any = Field(..., description="Best ratio before refinement")
    witness_ratio: Optional[Any] = Field(default=None, description="Best registered witness ratio")
    theoretical_k: Optional[Dict[str, Any]] = Field(default=None, description="Known value or interval")
    violations: List[Any] = Field(default_factory=list, description="SimplexViolation list at the theoretical bound")
    evaluations: int = 0
    optimizer: OptimizerSettings = Field(default_factory=OptimizerSettings)
    elapsed_ms: int = 0

    def to_payload(self) -> Dict[str, Any]:
        """The JSON file layout written by the CLI (fields in a fixed order)."""
        return {
            "distance": self.distance_name,
            "n": self.arity,
            "seed": self.seed,
            "budget": self.budget,
            "best_ratio": to_json_value(self.best_ratio),
            "witness": self.witness.to_json(),
            "theoretical": self.theoretical_k,
            "elapsed_ms": self.elapsed_ms,
        }


# Geometry

class HomogeneityReport(BaseModel):
    """Estimated degree of homogeneity of a planar n-distance."""
    distance: str
    degree: float = Field(..., description="Mean least-squares slope of log d(tx) on log t")
    samples_used: int
    scales: List[float]
    slopes: List[float] = Field(default_factory=list)
    residuals: List[float] = Field(default_factory=list, description="Max residual per sample")


# g-distances

class GPropertyReport(BaseModel):
    """Falsification-by-sampling result for one property of g."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    g_name: str
    property: str
    holds: bool
    samples: int
    seed: int
    counterexample: Optional[Dict[str, Any]] = None
    recovered_lambda: Optional[Any] = None


class GDistanceReport(BaseModel):
    """Sampling check of the g-distance conditions."""
    distance: str
    g_name: str
    passed: bool
    samples: int
    seed: int
    counterexamples: List[Dict[str, Any]] = Field(default_factory=list)


# CLI

class TableRow(BaseModel):
    """One row of the constants table."""
    distance: str
    n: int
    theoretical_lo: str = ""
    theoretical_hi: str = ""
    estimated: str = ""
    witness_ratio: str = ""
    status: TableStatus

    def as_csv_row(self) -> List[str]:
        return [
            self.distance, str(self.n), self.theoretical_lo, self.theoretical_hi,
            self.estimated, self.witness_ratio, self.status.value,
        ]


class RunConfig(BaseModel):
    """Validated command-line run."""
    command: Literal["check", "estimate", "witness", "table", "fermat", "sec", "graph"]
    distance: Optional[str] = None
    n: Optional[int] = Field(default=None, description="Arity")
    dimension: int = Field(default=2, ge=1, description="Dimension for Euclidean Fermat distances")
    space_params: Dict[str, Any] = Field(default_factory=dict)
    budget: int = Field(default_factory=lambda: settings.default_budget, ge=1)
    samples: int = Field(default_factory=lambda: settings.default_samples, ge=1)
    seed: int = Field(default_factory=lambda: settings.seed)
    points_path: Optional[str] = None
    graph_path: Optional[str] = None
    graph_action: Optional[Literal["median-check", "fermat3-table", "best-constant"]] = None
    output_path: Optional[str] = None
    output_format: Literal["json", "csv"] = "json"
    n_range: List[int] = Field(default_factory=lambda: [2, 3, 4, 5, 6])
    distances: List[str] = Field(default_factory=list)
    workers: int = Field(default_factory=lambda: settings.workers, ge=1)

    @field_validator("n")
    @classmethod
    def _arity_at_least_two(cls, value):
        if value is not None and value < 2:
            raise ValueError("arity must be at least 2")
        return value


def render(value: Any) -> str:
    """Exact values as p/q, floats with 17 significant digits, blanks for None."""
    if value is None:
        return ""
    return format_number(value)


__all__ = [
    "TableStatus", "OptimizerSettings", "AxiomFailure", "AxiomReport", "EstimateReport",
    "HomogeneityReport", "GPropertyReport", "GDistanceReport", "TableRow", "RunConfig",
    "render", "to_json_value",
]
