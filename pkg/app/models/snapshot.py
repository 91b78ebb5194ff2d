"""Snapshot specifications and snapshot graphs."""

import enum
from typing import Dict, FrozenSet, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from app.core.exceptions import UnknownNodeError
from app.models.features import TemporalInterval


class SnapshotMode(str, enum.Enum):
    TRANSIENT = "transient"
    CUMULATIVE = "cumulative"


class EdgePolicy(str, enum.Enum):
    """Which events induce edges."""
    ALL = "all"
    INTERACTION = "interaction"  # consumption events only
    FOLLOWSHIP = "followship"  # follow events only


class SnapshotSpec(BaseModel):
    """Window of one snapshot.

    Index 0 covers [start, start+L]; later transient windows are
    (start+iL, start+(i+1)L]. Cumulative windows always begin at start.
    """
    model_config = ConfigDict(frozen=True)

    mode: SnapshotMode = SnapshotMode.TRANSIENT
    interval_length: int = Field(28, gt=0)
    start_time: int = 0
    index: int = Field(0, ge=0)

    @property
    def window_end(self) -> int:
        return self.start_time + (self.index + 1) * self.interval_length

    @property
    def window_start(self) -> int:
        if self.mode == SnapshotMode.CUMULATIVE or self.index == 0:
            return self.start_time
        return self.start_time + self.index * self.interval_length + 1

    @property
    def interval(self) -> TemporalInterval:
        return TemporalInterval(start=self.window_start, end=self.window_end)

    def sub_interval(self, k: int) -> TemporalInterval:
        """Transient window k of the partition this spec belongs to."""
        return self.with_index(k, SnapshotMode.TRANSIENT).interval

    def sub_intervals(self) -> List[TemporalInterval]:
        return [self.sub_interval(k) for k in range(self.index + 1)]

    def with_index(self, index: int, mode: Optional[SnapshotMode] = None) -> "SnapshotSpec":
        return self.model_copy(update={"index": index, "mode": mode or self.mode})

    @property
    def name(self) -> str:
        return f"{self.mode.value}_{self.index:03d}"


class SnapshotGraph(BaseModel):
    """Directed graph of one window: edge (u, v) means v consumes content produced by u.

    `graph` is a frozen networkx DiGraph whose edges carry the positions of
    the inducing events in the log (`events`), plus `first_ts` / `last_ts`.
    `actions` indexes, per node, the positions of its own events in the window.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spec: SnapshotSpec
    graph: nx.DiGraph
    actions: Dict[int, Tuple[int, ...]] = {}
    event_positions: Tuple[int, ...] = ()
    disjoint: bool = False  # window does not intersect the log timespan

    @property
    def nodes(self) -> FrozenSet[int]:
        return frozenset(self.graph.nodes)

    @property
    def sorted_nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(self.graph.edges)

    @property
    def is_empty(self) -> bool:
        return self.graph.number_of_nodes() == 0

    def has_node(self, v: int) -> bool:
        return self.graph.has_node(v)

    def require_node(self, v: int) -> None:
        if not self.graph.has_node(v):
            raise UnknownNodeError(v)

    def in_neighbors(self, v: int) -> List[int]:
        """B_v: nodes whose content v consumes."""
        self.require_node(v)
        return sorted(self.graph.predecessors(v))

    def out_neighbors(self, v: int) -> List[int]:
        """R_v: nodes consuming v's content."""
        self.require_node(v)
        return sorted(self.graph.successors(v))

    def edge_events(self, u: int, v: int) -> Tuple[int, ...]:
        if not self.graph.has_edge(u, v):
            return ()
        return self.graph.edges[u, v]["events"]
