"""Row schemas for CSV input and report validation."""

from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Optional

from app.models.event import ActionKind, TARGETED_KINDS


class EventFormat(BaseModel):
    """Format descriptor of an event source."""
    delimiter: str = Field(",", min_length=1, max_length=1)
    encoding: str = "utf-8"


class EventRow(BaseModel):
    """One `actor,kind,target_node,target_post,timestamp` row."""
    actor: str = Field(..., min_length=1)
    kind: ActionKind
    target_node: Optional[str] = None
    target_post: Optional[str] = None
    timestamp: int = Field(..., ge=0)

    @field_validator("target_node", "target_post", mode="before")
    @classmethod
    def empty_as_none(cls, value):
        if isinstance(value, str) and value.strip() == "":
            return None
        return value

    @field_validator("kind", mode="before")
    @classmethod
    def normalize_kind(cls, value):
        return value.strip().lower() if isinstance(value, str) else value

    @model_validator(mode="after")
    def check_target(self) -> "EventRow":
        if self.kind in TARGETED_KINDS and self.target_node is None:
            raise ValueError(f"kind={self.kind.value} requires target_node")
        if self.kind == ActionKind.POST and self.target_node is not None:
            raise ValueError("kind=post must not have target_node")
        return self


class EvaluationRow(BaseModel):
    """One row of the evaluation report."""
    snapshot_end: int
    algorithm: str
    kendall_tau: Optional[float] = None
    fagin_at_25: Optional[float] = None
    converged: bool = True  # the candidate ranker reached its tolerance
