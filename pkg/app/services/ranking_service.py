"""LurkerRank family: time-unaware, time-static and time-evolving rankers."""

import logging
import math
from typing import Dict, Iterable, Optional, Union

import numpy as np
import scipy.sparse as sp

from app.core.exceptions import InvalidParameterError
from app.models.features import CumulativeScoreTable, Edge, IntervalFeatures
from app.models.rank import Algorithm, RankerConfig, RankVector, TemporalWeights
from app.models.snapshot import SnapshotGraph

logger = logging.getLogger(__name__)


def _blend(f: float, a_bar: float, cfg: RankerConfig) -> float:
    return (cfg.omega_f * f + cfg.omega_a * a_bar) / (cfg.omega_f + cfg.omega_a)


def node_weight(f: float, a_bar: float, cfg: RankerConfig) -> float:
    """w(v): blended freshness/activity, plain freshness without activity, 1 when never fresh."""
    if f == 0:
        return 1.0
    if a_bar == 0:
        return f
    return _blend(f, a_bar, cfg)


def edge_weight(f: float, a_bar: float, cfg: RankerConfig) -> float:
    """w(u, v): as node_weight, but 0 when the interaction is never fresh."""
    if f == 0:
        return 0.0
    if a_bar == 0:
        return f
    return _blend(f, a_bar, cfg)


class RankingService:
    """Service running the fixed-point rankers on snapshot graphs."""

    def weights_from_features(self, features: IntervalFeatures, cfg: RankerConfig) -> TemporalWeights:
        return TemporalWeights(
            node_weights={
                v: node_weight(f, features.node_activity.get(v, 0.0), cfg)
                for v, f in features.node_freshness.items()
            },
            edge_weights={
                e: edge_weight(f, features.edge_activity.get(e, 0.0), cfg)
                for e, f in features.edge_freshness.items()
            }
        )

    def weights_from_table(
        self,
        table: CumulativeScoreTable,
        index: int,
        cfg: RankerConfig,
        nodes: Iterable[int],
        edges: Iterable[Edge]
    ) -> TemporalWeights:
        """Cumulative weights at `index`: normalized cumulative scores in place of transient ones."""
        if not 0 <= index <= table.last_index:
            raise InvalidParameterError(f"table covers indices 0..{table.last_index}, got {index}")
        node_weights: Dict[int, float] = {}
        for v in nodes:
            s = table.node(index, v)
            node_weights[v] = node_weight(s.cf_norm, s.ca_norm, cfg) if s else 1.0
        edge_weights: Dict[Edge, float] = {}
        for u, v in edges:
            s = table.edge(index, u, v)
            edge_weights[(u, v)] = edge_weight(s.cf_norm, s.ca_norm, cfg) if s else 0.0
        return TemporalWeights(node_weights=node_weights, edge_weights=edge_weights)

    def lurker_rank(self, g: SnapshotGraph, cfg: RankerConfig) -> RankVector:
        """Time-unaware LurkerRank: unit node weights and zero edge weights."""
        return self._iterate(g, TemporalWeights(), cfg, Algorithm.LR, neutral=True)

    def ts_lurker_rank(
        self,
        g: SnapshotGraph,
        features: Union[IntervalFeatures, TemporalWeights],
        cfg: RankerConfig
    ) -> RankVector:
        if isinstance(features, IntervalFeatures):
            features = self.weights_from_features(features, cfg)
        return self._iterate(g, features, cfg, Algorithm.TS_LR)

    def te_lurker_rank(
        self,
        g: SnapshotGraph,
        table: CumulativeScoreTable,
        cfg: RankerConfig,
        index: Optional[int] = None
    ) -> RankVector:
        """Time-evolving LurkerRank on cumulative snapshot `index` (defaults to the graph's own index)."""
        i = g.spec.index if index is None else index
        weights = self.weights_from_table(table, i, cfg, g.sorted_nodes, sorted(g.edges))
        return self._iterate(g, weights, cfg, Algorithm.TE_LR)

    def _iterate(
        self,
        g: SnapshotGraph,
        weights: TemporalWeights,
        cfg: RankerConfig,
        algorithm: Algorithm,
        neutral: bool = False
    ) -> RankVector:
        """Synchronous fixed-point iteration shared by every LurkerRank variant.

        With A[u, v] = 1 for edge u -> v (v consumes u), smoothed in = |B_v| + 1
        and out = |R_v| + 1:

            L_in(v)  = exp(-sum_{u in B_v} w(u,v)) / (w(v) out(v)) * sum_{u in B_v} out(u)/in(u) r(u)
            L_out(v) = in(v) exp(-sum_{u in R_v} w(v,u)) / (w(v) sum_{u in R_v} in(u)) * sum_{u in R_v} in(u)/out(u) r(u)
            r(v)     = d L_in(v) (1 + L_out(v)) + (1 - d) / N

        Neutral weights (w(v) = 1, w(u,v) = 0) give plain LurkerRank.
        """
        if g.is_empty:
            raise InvalidParameterError(f"Cannot rank empty snapshot {g.spec.name}")

        nodes = g.sorted_nodes
        n = len(nodes)
        pos = {v: i for i, v in enumerate(nodes)}
        edges = sorted(g.edges)
        rows = np.fromiter((pos[u] for u, _ in edges), dtype=np.int64, count=len(edges))
        cols = np.fromiter((pos[v] for _, v in edges), dtype=np.int64, count=len(edges))
        adjacency = sp.csr_matrix((np.ones(len(edges)), (rows, cols)), shape=(n, n))

        w_node = np.ones(n)
        w_edge = np.zeros(len(edges))
        if not neutral:
            w_node = np.array([weights.node_weights.get(v, 1.0) for v in nodes], dtype=float)
            w_edge = np.array([weights.edge_weights.get(e, 0.0) for e in edges], dtype=float)
        weighted = sp.csr_matrix((w_edge, (rows, cols)), shape=(n, n))

        in_deg = np.asarray(adjacency.sum(axis=0)).ravel() + 1.0
        out_deg = np.asarray(adjacency.sum(axis=1)).ravel() + 1.0
        in_damp = np.exp(-np.asarray(weighted.sum(axis=0)).ravel())
        out_damp = np.exp(-np.asarray(weighted.sum(axis=1)).ravel())

        c_in = in_damp / (w_node * out_deg)
        successor_in = adjacency @ in_deg
        c_out = np.zeros(n)
        has_out = successor_in > 0
        c_out[has_out] = in_deg[has_out] * out_damp[has_out] / (w_node[has_out] * successor_in[has_out])

        to_in = out_deg / in_deg
        to_out = in_deg / out_deg
        adjacency_t = adjacency.T.tocsr()
        d = cfg.damping
        base = (1.0 - d) / n

        x = np.full(n, 1.0 / n)
        residual = math.inf
        converged = False
        iterations = 0
        for iterations in range(1, cfg.max_iterations + 1):
            l_in = c_in * (adjacency_t @ (to_in * x))
            l_out = c_out * (adjacency @ (to_out * x))
            x_new = d * l_in * (1.0 + l_out) + base

            norm = float(np.abs(x_new).sum())
            if not math.isfinite(norm) or norm > cfg.divergence_limit:
                logger.warning(
                    f"{algorithm.value} on {g.spec.name} diverged at iteration {iterations} (L1 norm {norm:.3g})"
                )
                break

            residual = float(np.abs(x_new - x).sum())
            x = x_new
            if residual <= cfg.tolerance:
                converged = True
                break

        if converged:
            logger.debug(f"{algorithm.value} on {g.spec.name} converged in {iterations} iterations")
        elif math.isfinite(residual):
            logger.warning(
                f"{algorithm.value} on {g.spec.name} did not converge in {iterations} iterations "
                f"(residual {residual:.3g})"
            )

        return RankVector(
            spec=g.spec,
            algorithm=algorithm,
            scores={v: float(s) for v, s in zip(nodes, x)},
            iterations=iterations,
            residual=residual if math.isfinite(residual) else float(np.abs(x).sum()),
            converged=converged
        )


# Singleton instance
ranking_service = RankingService()
