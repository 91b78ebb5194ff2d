"""Pydantic schemas for input rows, reports and run configuration."""

from app.schemas.rows import EvaluationRow, EventFormat, EventRow
from app.schemas.run_config import RunConfig

__all__ = [
    "EvaluationRow",
    "EventFormat",
    "EventRow",
    "RunConfig",
]
