from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class NumericalTolerances(BaseModel):
    """Numerical thresholds shared by every service.

    Experiment files may override any of them in their ``[tolerances]`` table.
    """

    # Pointer fields
    norm: float = Field(default=1e-9, gt=0, description="Allowed |norm - 1| for a normalized field")
    aliasing: float = Field(default=1e-9, gt=0, description="Max momentum mass in the outer 10% of the lattice")
    grid_sigmas: float = Field(default=8.0, gt=0, description="Half extent a pointer grid must cover, in sigma")
    truncation_sigmas: float = Field(default=5.0, gt=0, description="Min distance from center to cut, in sigma")

    # Hamiltonian application and oracle
    max_phase_step: float = Field(default=0.5, gt=0, description="Max phase change between x samples (rad)")
    roundoff_floor: float = Field(default=1e-11, gt=0)
    residual_bound: float = Field(default=1e-6, gt=0)
    order_min: float = Field(default=3.5)
    order_max: float = Field(default=4.5)

    # Reporting
    product_violation: float = Field(default=0.02, ge=0)
    expansion_warn: float = Field(default=0.1, gt=0, description="g*sigma above which AR runs log a warning")


class Settings(BaseSettings):
    # Application
    app_name: str = Field(default="energy-clock")
    app_version: str = Field(default="1.0.0")

    # Output and logging
    output_dir: Optional[Path] = Field(default=None)
    log_level: str = Field(default="INFO")

    # Worker pool
    default_jobs: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="ENERGYCLOCK_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
tolerances = NumericalTolerances()
