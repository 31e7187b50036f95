"""Process-wide knobs read from ``IRSDETECT_*`` variables or a local ``.env``.

Everything that changes results lives in the scenario file; these settings
only affect how the work is executed and reported.
"""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="IRSDETECT_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    threads: int = Field(
        default=1,
        ge=1,
        description="Worker threads for per-location Monte-Carlo evaluation",
    )

    # SDR
    sdr_solver: str = Field(
        default="CLARABEL",
        description="cvxpy conic solver used for the semidefinite relaxation",
    )
    sdr_tolerance: float = Field(
        default=1e-6,
        gt=0.0,
        description="Accepted relative duality gap of the relaxation",
    )
    default_repetitions: int = Field(
        default=80,
        ge=1,
        description="Randomized designs averaged for the optimized curve",
    )

    default_trials: int = Field(
        default=10_000,
        ge=1,
        description="Monte-Carlo trials per grid location",
    )

    debug: bool = Field(
        default=False,
        description="Log at DEBUG and let cvxpy report solver progress",
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings of the running process, read once on first use."""
    return Settings()
