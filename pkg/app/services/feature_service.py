"""Freshness, activity trend and cumulative scoring of users and interactions."""

import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.exceptions import InvalidParameterError
from app.models.event import EventLog
from app.models.features import (
    ActivitySeries,
    CumulativeScores,
    CumulativeScoreTable,
    DsaSeries,
    Edge,
    IntervalFeatures,
    TemporalInterval,
)
from app.models.snapshot import SnapshotSpec
from app.utils.dsa import DEFAULT_EPSILON_SCALE, dsa_transform

logger = logging.getLogger(__name__)

Subject = Union[int, Edge]

FEATURE_COLUMNS = ["node", "interval_index", "freshness", "avg_activity", "cf", "ca", "cf_norm", "ca_norm"]


def freshness_kernel(t: int, interval: TemporalInterval) -> float:
    """1 / log2(2 + (t_e - t)) inside the interval, 0 outside."""
    if not interval.contains(t):
        return 0.0
    return 1.0 / math.log2(2 + (interval.end - t))


def cumulate(values: Sequence[float]) -> np.ndarray:
    """Cumulative scoring over sub-interval indices.

    c_i = x_i + sum_{k<i} (1 - 2^(k-i)) x_k
    """
    x = np.asarray(values, dtype=float)
    out = np.empty_like(x)
    for i in range(len(x)):
        k = np.arange(i)
        out[i] = x[i] + float(np.sum((1.0 - np.power(2.0, k - i)) * x[:i]))
    return out


def normalize_cumulative(raw: np.ndarray, transient: np.ndarray, acausal: bool = False) -> np.ndarray:
    """(c_i / max_j c_j) * x_i, with the max over j <= i unless `acausal`; 0 where the max is 0."""
    if len(raw) == 0:
        return raw.copy()
    peak = np.full_like(raw, raw.max()) if acausal else np.maximum.accumulate(raw)
    out = np.zeros_like(raw)
    nonzero = peak > 0
    out[nonzero] = raw[nonzero] / peak[nonzero] * transient[nonzero]
    return out


class FeatureService:
    """Service computing temporal features over an event log."""

    def __init__(self, epsilon: Optional[float] = None, epsilon_scale: float = DEFAULT_EPSILON_SCALE):
        self.epsilon = epsilon
        self.epsilon_scale = epsilon_scale

    def user_freshness(self, log: EventLog, u: int, interval: TemporalInterval) -> float:
        """Freshness of u's most recent action inside the interval; 0 without one."""
        log.require_node(u)
        positions = log.actions_by_actor.get(u, ())
        if not positions:
            return 0.0
        times = log.times[list(positions)]
        inside = times[(times >= interval.start) & (times <= interval.end)]
        if inside.size == 0:
            return 0.0
        return freshness_kernel(int(inside.max()), interval)

    def activity_series(self, log: EventLog, subject: Subject, until: Optional[int] = None) -> ActivitySeries:
        """Per-day action counts of a node, or of v's consumptions of u's content for an edge (u, v).

        Only events up to `until` (inclusive) are counted.
        """
        positions = self._subject_positions(log, subject)
        if not positions:
            return ActivitySeries()
        times = log.times[list(positions)]
        if until is not None:
            times = times[times <= until]
        if times.size == 0:
            return ActivitySeries()
        days, counts = np.unique(times, return_counts=True)
        return ActivitySeries(counts=tuple(int(c) for c in counts), times=tuple(int(d) for d in days))

    def activity_trend(self, log: EventLog, subject: Subject, until: Optional[int] = None) -> Optional[DsaSeries]:
        series = self.activity_series(log, subject, until)
        if len(series) == 0:
            return None
        return dsa_transform(series, self.epsilon, self.epsilon_scale)

    @staticmethod
    def average_activity(trend: Optional[DsaSeries], interval: TemporalInterval) -> float:
        """Mean alpha-hat of the segments whose span intersects the interval."""
        if trend is None:
            return 0.0
        alphas = [s.alpha_hat for s in trend.segments if interval.intersects(s.start_time, s.end_time)]
        return float(np.mean(alphas)) if alphas else 0.0

    def user_activity(self, log: EventLog, u: int, interval: TemporalInterval) -> float:
        log.require_node(u)
        return self.average_activity(self.activity_trend(log, u, until=interval.end), interval)

    def interaction_freshness(self, log: EventLog, u: int, v: int, interval: TemporalInterval) -> float:
        """Best 1 / log2(2 + (t_c - t_p)) over v's consumptions of u's posts produced and consumed in the interval."""
        best = 0.0
        for pos in log.consumptions_by_pair.get((u, v), ()):
            event = log.events[pos]
            t_c = event.timestamp
            t_p = log.production_time(event)
            if t_p is None or t_p > t_c:
                continue
            if interval.start <= t_p and t_c <= interval.end:
                best = max(best, 1.0 / math.log2(2 + (t_c - t_p)))
        return best

    def interaction_activity(self, log: EventLog, u: int, v: int, interval: TemporalInterval) -> float:
        return self.average_activity(self.activity_trend(log, (u, v), until=interval.end), interval)

    def interval_features(
        self,
        log: EventLog,
        nodes: Iterable[int],
        edges: Iterable[Edge],
        interval: TemporalInterval,
        index: int = 0
    ) -> IntervalFeatures:
        """Transient freshness and average activity of the given nodes and edges over one interval."""
        node_freshness: Dict[int, float] = {}
        node_activity: Dict[int, float] = {}
        for v in sorted(nodes):
            node_freshness[v] = self.user_freshness(log, v, interval)
            node_activity[v] = self.user_activity(log, v, interval)

        edge_freshness: Dict[Edge, float] = {}
        edge_activity: Dict[Edge, float] = {}
        for u, v in sorted(edges):
            edge_freshness[(u, v)] = self.interaction_freshness(log, u, v, interval)
            edge_activity[(u, v)] = self.interaction_activity(log, u, v, interval)

        logger.debug(
            f"Features for interval {index} [{interval.start}, {interval.end}]: "
            f"{len(node_freshness)} nodes, {len(edge_freshness)} edges"
        )
        return IntervalFeatures(
            index=index,
            interval=interval,
            node_freshness=node_freshness,
            node_activity=node_activity,
            edge_freshness=edge_freshness,
            edge_activity=edge_activity
        )

    @staticmethod
    def cumulative_scores(
        freshness: Sequence[float],
        activity: Sequence[float],
        index: Optional[int] = None,
        acausal: bool = False
    ) -> CumulativeScores:
        """Raw and normalized cumulative scores at `index` (default: the last) from per-interval values."""
        if len(freshness) != len(activity) or len(freshness) == 0:
            raise InvalidParameterError("freshness and activity must be non-empty and aligned")
        i = len(freshness) - 1 if index is None else index
        if not 0 <= i < len(freshness):
            raise InvalidParameterError(f"index {i} outside 0..{len(freshness) - 1}")
        return FeatureService._score_all(list(freshness), list(activity), acausal)[i]

    def build_cumulative_table(
        self,
        log: EventLog,
        spec: SnapshotSpec,
        nodes: Iterable[int],
        edges: Iterable[Edge],
        acausal: bool = False
    ) -> CumulativeScoreTable:
        """Cumulative scores for every sub-interval 0..spec.index of the given nodes and edges."""
        nodes = sorted(nodes)
        edges = sorted(edges)
        intervals = spec.sub_intervals()
        per_interval = [
            self.interval_features(log, nodes, edges, interval, k)
            for k, interval in enumerate(intervals)
        ]

        node_rows: List[Dict[int, CumulativeScores]] = [{} for _ in intervals]
        for v in nodes:
            f = [p.node_freshness[v] for p in per_interval]
            a = [p.node_activity[v] for p in per_interval]
            for k, scores in enumerate(self._score_all(f, a, acausal)):
                node_rows[k][v] = scores

        edge_rows: List[Dict[Edge, CumulativeScores]] = [{} for _ in intervals]
        for e in edges:
            f = [p.edge_freshness[e] for p in per_interval]
            a = [p.edge_activity[e] for p in per_interval]
            for k, scores in enumerate(self._score_all(f, a, acausal)):
                edge_rows[k][e] = scores

        logger.info(f"Built cumulative table over {len(intervals)} intervals, {len(nodes)} nodes, {len(edges)} edges")
        return CumulativeScoreTable(intervals=tuple(intervals), nodes=tuple(node_rows), edges=tuple(edge_rows))

    @staticmethod
    def feature_rows(table: CumulativeScoreTable, index: int, log: EventLog) -> List[list]:
        """Audit rows of the node scores at one index, in FEATURE_COLUMNS order."""
        rows = []
        for v, s in sorted(table.nodes[index].items()):
            rows.append([log.labels[v], index, s.freshness, s.activity, s.cf, s.ca, s.cf_norm, s.ca_norm])
        return rows

    @staticmethod
    def _score_all(freshness: List[float], activity: List[float], acausal: bool) -> List[CumulativeScores]:
        f = np.asarray(freshness, dtype=float)
        a = np.asarray(activity, dtype=float)
        cf, ca = cumulate(f), cumulate(a)
        cf_norm = normalize_cumulative(cf, f, acausal)
        ca_norm = normalize_cumulative(ca, a, acausal)
        return [
            CumulativeScores(
                freshness=float(f[k]), activity=float(a[k]),
                cf=float(cf[k]), ca=float(ca[k]),
                cf_norm=float(cf_norm[k]), ca_norm=float(ca_norm[k])
            )
            for k in range(len(f))
        ]

    @staticmethod
    def _subject_positions(log: EventLog, subject: Subject) -> Tuple[int, ...]:
        if isinstance(subject, tuple):
            u, v = subject
            log.require_node(u)
            log.require_node(v)
            return log.consumptions_by_pair.get((u, v), ())
        log.require_node(subject)
        return log.actions_by_actor.get(subject, ())


# Singleton instance
feature_service = FeatureService()
