"""Ranker configuration, score vectors and ranking lists."""

import enum
from math import ceil
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.snapshot import SnapshotSpec


class Algorithm(str, enum.Enum):
    LR = "lr"  # time-unaware LurkerRank
    TS_LR = "ts-lr"  # time-static
    TE_LR = "te-lr"  # time-evolving
    DD = "dd"  # data-driven reference


class RankerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    damping: float = Field(0.85, ge=0.0, le=1.0)
    omega_f: float = Field(0.5, ge=0.0)
    omega_a: float = Field(0.5, ge=0.0)
    tolerance: float = Field(1e-9, gt=0.0)
    max_iterations: int = Field(200, ge=1)
    divergence_limit: float = Field(1e12, gt=0.0)

    @model_validator(mode="after")
    def check_omegas(self) -> "RankerConfig":
        if self.omega_f + self.omega_a <= 0:
            raise ValueError("omega_f + omega_a must be positive")
        return self


class TemporalWeights(BaseModel):
    """Node weights w(v) and edge weights w(u, v) fed to the time-aware rankers."""
    model_config = ConfigDict(frozen=True)

    node_weights: Dict[int, float] = {}
    edge_weights: Dict[Tuple[int, int], float] = {}


class RankVector(BaseModel):
    """Scores of one algorithm on one snapshot."""
    model_config = ConfigDict(frozen=True)

    spec: SnapshotSpec
    algorithm: Algorithm
    scores: Dict[int, float]
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True

    def ordered(self) -> List[int]:
        """Nodes by descending score, ties broken by node id."""
        return sorted(self.scores, key=lambda node: (-self.scores[node], node))

    def ranking(self) -> "RankingList":
        return RankingList(nodes=tuple(self.ordered()), source=self)

    def restrict(self, nodes: Iterable[int]) -> "RankVector":
        keep = set(nodes)
        return self.model_copy(update={"scores": {v: s for v, s in self.scores.items() if v in keep}})

    def top(self, fraction: float) -> List[int]:
        return self.ordered()[: ceil(fraction * len(self.scores))]

    def bottom(self, fraction: float) -> List[int]:
        count = ceil(fraction * len(self.scores))
        return self.ordered()[len(self.scores) - count:]


class RankingList(BaseModel):
    """Ordered node ids, best first."""
    model_config = ConfigDict(frozen=True)

    nodes: Tuple[int, ...]
    source: Optional[RankVector] = None

    @model_validator(mode="after")
    def check_unique(self) -> "RankingList":
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("ranking list contains duplicate nodes")
        return self

    def __len__(self) -> int:
        return len(self.nodes)
