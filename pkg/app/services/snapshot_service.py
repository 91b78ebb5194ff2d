"""Materialization of transient and cumulative snapshot graphs."""

import logging
from math import ceil
from typing import Dict, List, Optional, Tuple

import networkx as nx

from app.core.exceptions import InvalidParameterError
from app.models.event import ActionKind, EventLog
from app.models.snapshot import EdgePolicy, SnapshotGraph, SnapshotMode, SnapshotSpec

logger = logging.getLogger(__name__)


class SnapshotService:
    """Service for building snapshot graphs over an event log."""

    def build_snapshot(
        self,
        log: EventLog,
        spec: SnapshotSpec,
        policy: EdgePolicy = EdgePolicy.ALL,
        follow_carryover: bool = False
    ) -> SnapshotGraph:
        """Build the graph of `spec`'s window.

        A consumption by v of u's content, or v following u, yields edge (u, v).
        With `follow_carryover`, transient snapshots also keep follow edges
        created before the window start (those edges reference earlier events).
        """
        lo, hi = spec.window_start, spec.window_end
        disjoint = not log.events or hi < log.t_min or lo > log.t_max

        graph = nx.DiGraph()
        actions: Dict[int, List[int]] = {}
        positions = list(log.positions_between(lo, hi)) if not disjoint else []

        for pos in positions:
            event = log.events[pos]
            graph.add_node(event.actor)
            actions.setdefault(event.actor, []).append(pos)
            if event.target_node is not None:
                graph.add_node(event.target_node)
            if self._induces_edge(event.kind, policy) and event.target_node != event.actor:
                self._add_event(graph, event.target_node, event.actor, pos, event.timestamp)

        carry = (
            follow_carryover
            and spec.mode == SnapshotMode.TRANSIENT
            and policy != EdgePolicy.INTERACTION
        )
        if carry:
            for pos in log.positions_between(log.t_min, lo - 1):
                event = log.events[pos]
                if event.kind == ActionKind.FOLLOW and event.target_node != event.actor:
                    self._add_event(graph, event.target_node, event.actor, pos, event.timestamp)

        snapshot = SnapshotGraph(
            spec=spec,
            graph=nx.freeze(graph),
            actions={node: tuple(p) for node, p in actions.items()},
            event_positions=tuple(positions),
            disjoint=disjoint
        )
        if disjoint:
            logger.warning(f"Snapshot {spec.name} window [{lo}, {hi}] is disjoint from the log timespan")
        else:
            logger.debug(
                f"Built {spec.name} [{lo}, {hi}] with {graph.number_of_nodes()} nodes, "
                f"{graph.number_of_edges()} edges"
            )
        return snapshot

    def smoothed_degrees(self, g: SnapshotGraph, v: int) -> Tuple[int, int]:
        """Laplace add-one smoothed (in-degree, out-degree) of v."""
        g.require_node(v)
        return g.graph.in_degree(v) + 1, g.graph.out_degree(v) + 1

    def snapshot_count(self, log: EventLog, interval_length: int, start_time: Optional[int] = None) -> int:
        """Number of windows needed to cover the log from `start_time`."""
        start = log.t_min if start_time is None else start_time
        return max(1, ceil((log.t_max - start) / interval_length))

    def make_specs(
        self,
        log: EventLog,
        mode: SnapshotMode,
        interval_length: int,
        start_time: Optional[int] = None,
        count: Optional[int] = None
    ) -> List[SnapshotSpec]:
        if interval_length <= 0:
            raise InvalidParameterError(f"interval length must be positive, got {interval_length}")
        start = log.t_min if start_time is None else start_time
        total = count if count is not None else self.snapshot_count(log, interval_length, start)
        return [
            SnapshotSpec(mode=mode, interval_length=interval_length, start_time=start, index=i)
            for i in range(total)
        ]

    def edge_rows(self, g: SnapshotGraph, log: EventLog) -> List[list]:
        """Edge-list dump rows: src, dst, event_count, first_ts, last_ts."""
        rows = []
        for u, v in sorted(g.graph.edges):
            data = g.graph.edges[u, v]
            rows.append([log.labels[u], log.labels[v], len(data["events"]), data["first_ts"], data["last_ts"]])
        return rows

    @staticmethod
    def _induces_edge(kind: ActionKind, policy: EdgePolicy) -> bool:
        if kind == ActionKind.POST:
            return False
        if kind == ActionKind.FOLLOW:
            return policy in (EdgePolicy.ALL, EdgePolicy.FOLLOWSHIP)
        return policy in (EdgePolicy.ALL, EdgePolicy.INTERACTION)

    @staticmethod
    def _add_event(graph: nx.DiGraph, u: int, v: int, pos: int, timestamp: int) -> None:
        if graph.has_edge(u, v):
            data = graph.edges[u, v]
            data["events"] = data["events"] + (pos,)
            data["first_ts"] = min(data["first_ts"], timestamp)
            data["last_ts"] = max(data["last_ts"], timestamp)
        else:
            graph.add_edge(u, v, events=(pos,), first_ts=timestamp, last_ts=timestamp)


# Singleton instance
snapshot_service = SnapshotService()
