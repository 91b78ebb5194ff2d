"""Application configuration settings."""

from pydantic_settings import BaseSettings
from functools import lru_cache
from typing import Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables or a KEY=value file."""

    # Application
    APP_NAME: str = "LurkScope"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Input / output
    INPUT_PATH: Optional[str] = None
    OUTPUT_DIR: str = "runs/latest"

    # Snapshots
    EDGE_POLICY: str = "all"  # all, interaction or followship
    FOLLOW_CARRYOVER: bool = False  # transient snapshots keep earlier follow edges
    SNAPSHOT_MODE: str = "transient"  # transient or cumulative
    INTERVAL_DAYS: int = 28  # a "month" is 4 weeks
    START_TIME: Optional[int] = None  # defaults to the first event day
    SNAPSHOT_COUNT: Optional[int] = None  # defaults to every window covering the log

    # Rankers
    DAMPING: float = 0.85
    OMEGA_F: float = 0.5
    OMEGA_A: float = 0.5
    TOLERANCE: float = 1e-9
    MAX_ITERATIONS: int = 200
    DIVERGENCE_LIMIT: float = 1e12

    # Temporal features
    DSA_EPSILON: Optional[float] = None  # absolute threshold, None = scale-relative
    DSA_EPSILON_SCALE: float = 0.5
    ACAUSAL_NORMALIZATION: bool = False

    # Evaluation
    TOP_FRAC: float = 0.25
    DD_COUNT_COMMENTS: bool = False

    # Behavioral analyses
    CATEGORY_FRAC: float = 0.25
    ZERO_CONTRIBUTOR_SCOPE: str = "history"  # history or window
    ANALYSIS_INTERVAL_DAYS: int = 7
    ECDF_HORIZON: int = 90
    FCM_CLUSTERS: int = 4
    FCM_FUZZIFIER: float = 1.25
    FCM_TOLERANCE: float = 1e-9
    FCM_MAX_ITER: int = 300
    ANALYSES: str = "overlap,responsiveness"

    @property
    def ANALYSES_LIST(self) -> list:
        """Parse ANALYSES string into a list."""
        return [name.strip() for name in self.ANALYSES.split(",") if name.strip()]

    # Execution
    JOBS: int = 1
    SEED: int = 42

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


@lru_cache()
def get_settings(env_file: Optional[str] = None) -> Settings:
    """Get cached settings instance, optionally read from a KEY=value config file."""
    if env_file:
        return Settings(_env_file=env_file)
    return Settings()


settings = get_settings()
