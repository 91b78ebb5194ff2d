"""Temporal feature types: intervals, activity series, DSA series and cumulative scores."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

Edge = Tuple[int, int]


class TemporalInterval(BaseModel):
    """Closed interval of integer days [start, end]."""
    model_config = ConfigDict(frozen=True)

    start: int
    end: int

    @model_validator(mode="after")
    def check_bounds(self) -> "TemporalInterval":
        if self.start > self.end:
            raise ValueError(f"interval start {self.start} > end {self.end}")
        return self

    def contains(self, t: int) -> bool:
        return self.start <= t <= self.end

    def intersects(self, start: int, end: int) -> bool:
        return start <= self.end and end >= self.start

    @property
    def length(self) -> int:
        return self.end - self.start + 1


class ActivitySeries(BaseModel):
    """Per-day action counts; days without actions are omitted."""
    model_config = ConfigDict(frozen=True)

    counts: Tuple[int, ...] = ()
    times: Tuple[int, ...] = ()

    @model_validator(mode="after")
    def check_points(self) -> "ActivitySeries":
        if len(self.counts) != len(self.times):
            raise ValueError("counts and times must have the same length")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        if any(a >= b for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        return self

    @property
    def points(self) -> List[Tuple[int, int]]:
        return list(zip(self.counts, self.times))

    def __len__(self) -> int:
        return len(self.counts)


class DsaSegment(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha_hat: float
    start_time: int
    end_time: int
    length: int = Field(..., ge=1)


class DsaSeries(BaseModel):
    """Segment approximation of an activity series (the activity trend)."""
    model_config = ConfigDict(frozen=True)

    segments: Tuple[DsaSegment, ...]
    source_length: int

    @model_validator(mode="after")
    def check_segments(self) -> "DsaSeries":
        if sum(s.length for s in self.segments) != self.source_length:
            raise ValueError("segment lengths must sum to the source length")
        ends = [s.end_time for s in self.segments]
        if any(a >= b for a, b in zip(ends, ends[1:])):
            raise ValueError("segment end times must be strictly increasing")
        return self

    @property
    def alphas(self) -> List[float]:
        return [s.alpha_hat for s in self.segments]

    @property
    def end_times(self) -> List[int]:
        return [s.end_time for s in self.segments]

    def __len__(self) -> int:
        return len(self.segments)


class IntervalFeatures(BaseModel):
    """Transient freshness and average activity of nodes and edges over one interval."""
    model_config = ConfigDict(frozen=True)

    index: int
    interval: TemporalInterval
    node_freshness: Dict[int, float] = {}
    node_activity: Dict[int, float] = {}
    edge_freshness: Dict[Edge, float] = {}
    edge_activity: Dict[Edge, float] = {}


class CumulativeScores(BaseModel):
    """Raw and normalized cumulative scores of one subject at one index."""
    model_config = ConfigDict(frozen=True)

    freshness: float
    activity: float
    cf: float
    ca: float
    cf_norm: float
    ca_norm: float


class CumulativeScoreTable(BaseModel):
    """Cumulative scores per sub-interval index, for nodes and for edges."""
    model_config = ConfigDict(frozen=True)

    intervals: Tuple[TemporalInterval, ...]
    nodes: Tuple[Dict[int, CumulativeScores], ...]
    edges: Tuple[Dict[Edge, CumulativeScores], ...]

    @property
    def last_index(self) -> int:
        return len(self.intervals) - 1

    def node(self, index: int, v: int) -> Optional[CumulativeScores]:
        return self.nodes[index].get(v)

    def edge(self, index: int, u: int, v: int) -> Optional[CumulativeScores]:
        return self.edges[index].get((u, v))
