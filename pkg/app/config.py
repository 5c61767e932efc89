"""
Application configuration settings.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ND_)."""

    model_config = SettingsConfigDict(
        env_prefix="ND_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Ignore extra env vars not defined in Settings
    )

    # App settings
    app_name: str = "N-Distance Lab"
    debug: bool = False
    log_level: str = "WARNING"

    # Seeding (ND_SEED)
    seed: int = 0

    # Numerics
    float_tolerance: float = 1e-9
    direction_angle_tolerance: float = 1e-9  # radians

    # Default sampling spaces
    label_count: int = 10  # labels 0..9
    real_low: float = 0.0
    real_high: float = 1.0
    plane_low: float = 0.0
    plane_high: float = 1.0
    integer_coord_max: int = 9  # integer plane 0..9
    progression_low: int = -5
    progression_high: int = 5
    tie_rate: float = 0.25  # chance a sampled entry copies an earlier one

    # Sampling budgets
    default_samples: int = 1000
    default_budget: int = 10_000
    g_property_samples: int = 1000

    # Best-constant refinement
    refine_starts: int = 10
    refine_steps: int = 200
    refine_patience: int = 20  # consecutive failures before the step is halved
    refine_initial_step: float = 0.1

    # Weiszfeld solver
    weiszfeld_tol: float = 1e-10
    weiszfeld_max_iter: int = 10_000

    # Graphs
    graph_vertex_cap: int = 4096
    graph_exhaustive_cap: int = 64  # V^4 best-constant scan

    # Parallel ratio evaluation (results never depend on this)
    workers: int = 1


# Global settings instance
settings = Settings()
