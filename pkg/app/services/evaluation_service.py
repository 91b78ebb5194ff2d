"""Data-driven reference ranking and rank-list comparison metrics."""

import logging
from math import ceil
from typing import Dict, List, Sequence

from scipy import stats

from app.core.exceptions import InvalidParameterError
from app.models.event import ActionKind, EventLog
from app.models.rank import Algorithm, RankingList, RankVector
from app.models.snapshot import SnapshotGraph
from app.schemas.rows import EvaluationRow

logger = logging.getLogger(__name__)

NORMALIZATION_METHODS = ("minmax", "sum1")


def fagin_k(size: int, fraction: float = 0.25) -> int:
    """Top-k depth for a list of `size` nodes: ceil(fraction * size), at least 1."""
    return max(1, ceil(fraction * size))


class EvaluationService:
    """Service comparing algorithm rankings against the data-driven reference."""

    def data_driven_rank(self, log: EventLog, g: SnapshotGraph, count_comments: bool = False) -> RankVector:
        """Consumption-to-production ratio of every node of `g` over the snapshot window.

        score(v) = (favorites and likes by v on content of B_v) / (1 + posts by v)

        Only consumptions along an edge (u, v) of `g` count, so under the
        followship policy likes on users v does not follow are ignored.
        """
        graph = g.graph
        kinds = {ActionKind.FAVORITE, ActionKind.LIKE}
        if count_comments:
            kinds.add(ActionKind.COMMENT)

        consumed: Dict[int, int] = {}
        produced: Dict[int, int] = {}
        for pos in log.positions_between(g.spec.window_start, g.spec.window_end):
            event = log.events[pos]
            if event.kind == ActionKind.POST:
                produced[event.actor] = produced.get(event.actor, 0) + 1
            elif event.kind in kinds and graph.has_edge(event.target_node, event.actor):
                consumed[event.actor] = consumed.get(event.actor, 0) + 1

        scores = {v: consumed.get(v, 0) / (1 + produced.get(v, 0)) for v in g.sorted_nodes}
        return RankVector(spec=g.spec, algorithm=Algorithm.DD, scores=scores)

    def kendall_tau(self, first: RankingList, second: RankingList) -> float:
        """1 - 2 * |P(L1) symmetric-difference P(L2)| / (M (M - 1)) over ordered pairs.

        Both lists are total orders, so this is the tau of their rank positions.
        """
        if set(first.nodes) != set(second.nodes):
            raise InvalidParameterError("Kendall-tau requires rankings over the same node set")
        m = len(first)
        if m < 2:
            raise InvalidParameterError(f"Kendall-tau requires at least 2 nodes, got {m}")
        rank_in_second = {node: i for i, node in enumerate(second.nodes)}
        tau, _ = stats.kendalltau(list(range(m)), [rank_in_second[node] for node in first.nodes])
        return float(tau)

    def fagin_intersection(self, first: RankingList, second: RankingList, k: int) -> float:
        """Average over depths q = 1..k of the top-q overlap fraction."""
        if not 1 <= k <= min(len(first), len(second)):
            raise InvalidParameterError(f"k must lie in 1..{min(len(first), len(second))}, got {k}")
        seen_first, seen_second = set(), set()
        overlap = 0
        total = 0.0
        for q in range(1, k + 1):
            a, b = first.nodes[q - 1], second.nodes[q - 1]
            if a == b:
                overlap += 1
            else:
                overlap += (a in seen_second) + (b in seen_first)
            seen_first.add(a)
            seen_second.add(b)
            total += overlap / q
        return total / k

    def normalize_scores(self, vector: RankVector, method: str = "minmax") -> RankVector:
        if not vector.scores:
            raise InvalidParameterError("Cannot normalize an empty score vector")
        if method not in NORMALIZATION_METHODS:
            raise InvalidParameterError(f"Unknown normalization method: {method}")

        values = vector.scores.values()
        if method == "minmax":
            lo, hi = min(values), max(values)
            if hi == lo:
                scores = {v: 0.5 for v in vector.scores}
            else:
                scores = {v: (s - lo) / (hi - lo) for v, s in vector.scores.items()}
        else:
            total = sum(values)
            scores = {v: (s / total if total else 0.0) for v, s in vector.scores.items()}
        return vector.model_copy(update={"scores": scores})

    def compare(
        self,
        reference: RankVector,
        candidates: Sequence[RankVector],
        top_frac: float = 0.25
    ) -> List[EvaluationRow]:
        """Evaluation rows of each candidate against the reference, restricted to the reference's nodes."""
        nodes = set(reference.scores)
        truth = reference.ranking()
        rows = []
        for candidate in candidates:
            ranked = candidate.restrict(nodes).ranking()
            row = EvaluationRow(
                snapshot_end=reference.spec.window_end,
                algorithm=candidate.algorithm.value,
                converged=candidate.converged
            )
            if not candidate.converged:
                logger.warning(
                    f"{candidate.algorithm.value} on {reference.spec.name} did not converge "
                    f"after {candidate.iterations} iterations (residual {candidate.residual:.3g})"
                )
            if len(truth) < 2 or set(ranked.nodes) != nodes:
                logger.warning(
                    f"Skipping metrics for {candidate.algorithm.value} on {reference.spec.name}: "
                    f"{len(truth)} reference nodes, {len(ranked)} ranked"
                )
            else:
                row.kendall_tau = self.kendall_tau(ranked, truth)
                row.fagin_at_25 = self.fagin_intersection(ranked, truth, fagin_k(len(truth), top_frac))
            rows.append(row)
        return rows


# Singleton instance
evaluation_service = EvaluationService()
