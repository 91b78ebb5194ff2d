"""Result types of the behavioral analyses."""

from typing import Any, Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class UserCategorySnapshot(BaseModel):
    """User categories at one interval."""
    model_config = ConfigDict(frozen=True)

    index: int
    fraction: float
    potential_lurkers: FrozenSet[int] = frozenset()
    zero_contributors: FrozenSet[int] = frozenset()
    newcomers: FrozenSet[int] = frozenset()
    top_lurkers: FrozenSet[int] = frozenset()
    active_users: FrozenSet[int] = frozenset()


class AttachmentSeries(BaseModel):
    """Average number of new qualifying links per user and week, for each k."""
    model_config = ConfigDict(frozen=True)

    mode: str
    points: Tuple[Tuple[int, float], ...]
    observations: int
    slope: float
    intercept: float
    correlation: float


class PowerLawFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    x_min: int
    ks_statistic: float
    n_tail: int
    method: str


class Ecdf(BaseModel):
    """Step points (latency, cumulative fraction) of an empirical CDF."""
    model_config = ConfigDict(frozen=True)

    points: Tuple[Tuple[int, float], ...] = ()
    sample_size: int = 0
    horizon: int = 90

    @property
    def empty(self) -> bool:
        return self.sample_size == 0

    def at(self, x: float) -> float:
        value = 0.0
        for latency, fraction in self.points:
            if latency > x:
                break
            value = fraction
        return value


class ScoreTimeSeries(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    node: int
    values: np.ndarray
    standardized: np.ndarray


class FuzzyClustering(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    clusters: int
    fuzzifier: float = Field(..., gt=1.0)
    nodes: Tuple[int, ...]
    memberships: np.ndarray  # node x cluster
    centroids: np.ndarray  # cluster x series length
    objective: float
    objective_history: Tuple[float, ...]
    iterations: int

    def dominant_cluster(self) -> Dict[int, int]:
        best = np.argmax(self.memberships, axis=1)
        return {node: int(c) for node, c in zip(self.nodes, best)}


class AnalysisReport(BaseModel):
    """Tabular output of one analysis plus its summary parameters."""
    name: str
    columns: List[str]
    rows: List[List[Any]] = []
    summary: Dict[str, Any] = {}
    warnings: List[str] = []
    skipped: Optional[str] = None
