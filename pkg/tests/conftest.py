"""Shared fixtures: hand-built event logs and graph builders."""

import networkx as nx
import numpy as np
import pytest

from app.models.event import EventLog
from app.models.rank import RankerConfig
from app.models.snapshot import SnapshotGraph, SnapshotMode, SnapshotSpec
from app.schemas.rows import EventRow
from app.services.ingest_service import ingest_service


def make_log(rows) -> EventLog:
    """rows: (actor, kind, target_node, target_post, day) tuples."""
    return ingest_service.build_log(
        EventRow(actor=a, kind=k, target_node=t, target_post=p, timestamp=day)
        for a, k, t, p, day in rows
    )


def make_graph(edges, nodes=(), index=0, mode=SnapshotMode.TRANSIENT, interval=28) -> SnapshotGraph:
    """Snapshot graph straight from (u, v) or (u, v, first_ts) tuples."""
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    for edge in edges:
        u, v = edge[0], edge[1]
        ts = edge[2] if len(edge) > 2 else 0
        graph.add_edge(u, v, events=(), first_ts=ts, last_ts=ts)
    spec = SnapshotSpec(mode=mode, interval_length=interval, start_time=0, index=index)
    return SnapshotGraph(spec=spec, graph=nx.freeze(graph))


def random_graph(rng: np.random.Generator, max_nodes: int = 8, p: float = 0.3) -> SnapshotGraph:
    n = int(rng.integers(2, max_nodes + 1))
    edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
    return make_graph(edges, nodes=range(n))


@pytest.fixture
def ranker() -> RankerConfig:
    return RankerConfig(tolerance=1e-12, max_iterations=1000)


@pytest.fixture
def small_csv() -> bytes:
    return (
        b"actor,kind,target_node,target_post,timestamp\n"
        b"alice,post,,p1,0\n"
        b"bob,like,alice,p1,1\n"
        b"bob,follow,alice,,2\n"
    )


@pytest.fixture
def two_month_log() -> EventLog:
    """Events over days 0..55: one producer, two consumers, one late joiner."""
    return make_log([
        ("ann", "post", None, "a1", 0),
        ("bea", "follow", "ann", None, 1),
        ("bea", "like", "ann", "a1", 2),
        ("cid", "favorite", "ann", "a1", 5),
        ("ann", "post", None, "a2", 20),
        ("bea", "like", "ann", "a2", 20),
        ("cid", "comment", "ann", "a2", 28),
        ("bea", "post", None, "b1", 29),
        ("ann", "like", "bea", "b1", 30),
        ("dan", "follow", "ann", None, 40),
        ("dan", "like", "ann", "a2", 41),
        ("cid", "favorite", "bea", "b1", 55),
    ])
