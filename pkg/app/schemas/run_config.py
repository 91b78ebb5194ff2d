"""Validated configuration of one run."""

import hashlib
import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from app.core.config import Settings
from app.core.exceptions import ConfigError
from app.models.rank import RankerConfig
from app.models.snapshot import EdgePolicy, SnapshotMode

ANALYSIS_NAMES = ("overlap", "newcomers", "prefattach", "responsiveness", "cluster")

# Settings fields that describe the application rather than the run
_APP_FIELDS = {"APP_NAME", "APP_VERSION", "DEBUG"}


class RunConfig(BaseModel):
    """Every knob of a run, range-checked. Built from Settings plus CLI overrides."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    input_path: Optional[str] = None
    output_dir: str = "runs/latest"

    edge_policy: EdgePolicy = EdgePolicy.ALL
    follow_carryover: bool = False
    snapshot_mode: SnapshotMode = SnapshotMode.TRANSIENT
    interval_days: int = Field(28, gt=0)
    start_time: Optional[int] = Field(None, ge=0)
    snapshot_count: Optional[int] = Field(None, ge=1)

    damping: float = Field(0.85, ge=0.0, le=1.0)
    omega_f: float = Field(0.5, ge=0.0)
    omega_a: float = Field(0.5, ge=0.0)
    tolerance: float = Field(1e-9, gt=0.0)
    max_iterations: int = Field(200, ge=1)
    divergence_limit: float = Field(1e12, gt=0.0)

    dsa_epsilon: Optional[float] = Field(None, ge=0.0)
    dsa_epsilon_scale: float = Field(0.5, gt=0.0)
    acausal_normalization: bool = False

    top_frac: float = Field(0.25, gt=0.0, le=1.0)
    dd_count_comments: bool = False

    category_frac: float = Field(0.25, gt=0.0, le=1.0)
    zero_contributor_scope: Literal["history", "window"] = "history"
    analysis_interval_days: int = Field(7, gt=0)
    ecdf_horizon: int = Field(90, ge=0)
    fcm_clusters: int = Field(4, ge=2)
    fcm_fuzzifier: float = Field(1.25, gt=1.0)
    fcm_tolerance: float = Field(1e-9, gt=0.0)
    fcm_max_iter: int = Field(300, ge=1)
    analyses: List[str] = ["overlap", "responsiveness"]

    jobs: int = Field(1, ge=1)
    seed: int = Field(42, ge=0)

    @field_validator("analyses", mode="before")
    @classmethod
    def split_analyses(cls, value):
        if isinstance(value, str):
            return [name.strip() for name in value.split(",") if name.strip()]
        return value

    @field_validator("analyses")
    @classmethod
    def check_analyses(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in ANALYSIS_NAMES]
        if unknown:
            raise ValueError(f"unknown analyses {', '.join(unknown)}; choose from {', '.join(ANALYSIS_NAMES)}")
        return value

    @model_validator(mode="after")
    def check_omegas(self) -> "RunConfig":
        if self.omega_f + self.omega_a <= 0:
            raise ValueError("omega_f + omega_a must be positive")
        return self

    @classmethod
    def from_settings(cls, settings: Settings, **overrides: Any) -> "RunConfig":
        """Merge settings with non-None overrides; range violations raise ConfigError naming the fields."""
        values: Dict[str, Any] = {
            name.lower(): getattr(settings, name)
            for name in type(settings).model_fields
            if name not in _APP_FIELDS
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            fields = sorted({name for err in e.errors() for name in _error_fields(err)})
            details = "; ".join(
                f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
            )
            raise ConfigError(fields, f"Invalid configuration: {details}")

    def ranker_config(self) -> RankerConfig:
        return RankerConfig(
            damping=self.damping,
            omega_f=self.omega_f,
            omega_a=self.omega_a,
            tolerance=self.tolerance,
            max_iterations=self.max_iterations,
            divergence_limit=self.divergence_limit
        )

    def canonical_json(self) -> str:
        """Sorted-key JSON of every field except the output location."""
        return json.dumps(self.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def _error_fields(error: dict) -> List[str]:
    if error["loc"]:
        return [str(error["loc"][0])]
    return ["omega_f", "omega_a"] if "omega" in error.get("msg", "") else ["config"]
