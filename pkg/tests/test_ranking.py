import math

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError
from app.models.rank import Algorithm, RankerConfig, TemporalWeights
from app.models.snapshot import SnapshotMode
from app.services.feature_service import feature_service
from app.services.ranking_service import edge_weight, node_weight, ranking_service
from app.services.snapshot_service import snapshot_service
from tests.conftest import make_graph, make_log, random_graph


def direct_update(g, scores, cfg, weights=None):
    """One fixed-point update evaluated node by node from adjacency lists."""
    weights = weights or TemporalWeights()
    nodes = g.sorted_nodes
    n = len(nodes)
    ins = {v: g.graph.in_degree(v) + 1 for v in nodes}
    outs = {v: g.graph.out_degree(v) + 1 for v in nodes}
    out = {}
    for v in nodes:
        w_v = weights.node_weights.get(v, 1.0)
        preds = list(g.graph.predecessors(v))
        succs = list(g.graph.successors(v))
        l_in = math.exp(-sum(weights.edge_weights.get((u, v), 0.0) for u in preds)) / (w_v * outs[v])
        l_in *= sum(outs[u] / ins[u] * scores[u] for u in preds)
        l_out = 0.0
        if succs:
            l_out = ins[v] * math.exp(-sum(weights.edge_weights.get((v, u), 0.0) for u in succs))
            l_out /= w_v * sum(ins[u] for u in succs)
            l_out *= sum(ins[u] / outs[u] * scores[u] for u in succs)
        out[v] = cfg.damping * l_in * (1 + l_out) + (1 - cfg.damping) / n
    return out


class TestWeights:

    def test_node_weight_branches(self):
        cfg = RankerConfig()
        assert node_weight(0.8, 0.6, cfg) == pytest.approx(0.7)
        assert node_weight(0.4, 0.0, cfg) == 0.4
        assert node_weight(0.0, 0.9, cfg) == 1.0

    def test_edge_weight_branches(self):
        cfg = RankerConfig()
        assert edge_weight(1.0, 0.75, cfg) == pytest.approx(0.875)
        assert edge_weight(0.5, 0.0, cfg) == 0.5
        assert edge_weight(0.0, 0.9, cfg) == 0.0

    def test_omega_blend(self):
        cfg = RankerConfig(omega_f=3.0, omega_a=1.0)
        assert node_weight(0.8, 0.4, cfg) == pytest.approx(0.7)


class TestLurkerRank:

    def test_fixed_point_on_random_graphs(self, ranker):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            g = random_graph(rng)
            result = ranking_service.lurker_rank(g, ranker)
            assert result.converged
            again = direct_update(g, result.scores, ranker)
            for v in g.sorted_nodes:
                assert abs(again[v] - result.scores[v]) < 1e-8
                assert result.scores[v] >= (1 - ranker.damping) / len(g.sorted_nodes)

    def test_symmetric_pair(self, ranker):
        result = ranking_service.lurker_rank(make_graph([(0, 1), (1, 0)]), ranker)
        assert result.scores[0] == result.scores[1]

    def test_chain(self, ranker):
        result = ranking_service.lurker_rank(make_graph([(0, 1), (1, 2)]), ranker)
        assert result.scores[2] > result.scores[1] > result.scores[0]
        assert result.ordered() == [2, 1, 0]

    def test_star(self, ranker):
        hub = 0
        result = ranking_service.lurker_rank(make_graph([(hub, s) for s in range(1, 5)]), ranker)
        sinks = [result.scores[s] for s in range(1, 5)]
        assert len(set(sinks)) == 1
        assert sinks[0] > result.scores[hub]

    def test_deterministic(self, ranker):
        rng = np.random.default_rng(8)
        g = random_graph(rng)
        first = ranking_service.lurker_rank(g, ranker)
        second = ranking_service.lurker_rank(g, ranker)
        assert first.scores == second.scores

    def test_non_convergence_is_flagged(self):
        cfg = RankerConfig(max_iterations=1)
        result = ranking_service.lurker_rank(make_graph([(0, 1), (1, 2)]), cfg)
        assert not result.converged
        assert result.iterations == 1
        assert result.algorithm == Algorithm.LR

    def test_divergence_guard(self):
        cfg = RankerConfig(divergence_limit=1e-3)
        result = ranking_service.lurker_rank(make_graph([(0, 1)]), cfg)
        assert not result.converged
        assert result.iterations == 1

    def test_empty_graph(self, ranker):
        with pytest.raises(InvalidParameterError):
            ranking_service.lurker_rank(make_graph([]), ranker)


class TestTimeStaticLurkerRank:

    def test_neutral_weights_reduce_to_lurker_rank(self, ranker):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            g = random_graph(rng)
            neutral = TemporalWeights(
                node_weights={v: 1.0 for v in g.nodes},
                edge_weights={e: 0.0 for e in g.edges}
            )
            lr = ranking_service.lurker_rank(g, ranker)
            ts = ranking_service.ts_lurker_rank(g, neutral, ranker)
            assert ts.algorithm == Algorithm.TS_LR
            for v in g.nodes:
                assert abs(lr.scores[v] - ts.scores[v]) < 1e-12

    def test_weighted_edge_damps_in_term(self, ranker):
        g = make_graph([(0, 1), (1, 2)])
        weights = TemporalWeights(edge_weights={(0, 1): 1.0})
        ts = ranking_service.ts_lurker_rank(g, weights, ranker)
        lr = ranking_service.lurker_rank(g, ranker)
        assert ts.scores[1] < lr.scores[1]

    def test_matches_direct_update(self, ranker):
        rng = np.random.default_rng(31)
        for _ in range(30):
            g = random_graph(rng)
            weights = TemporalWeights(
                node_weights={v: float(rng.uniform(0.2, 1.0)) for v in g.nodes},
                edge_weights={e: float(rng.uniform(0.0, 1.0)) for e in g.edges}
            )
            result = ranking_service.ts_lurker_rank(g, weights, ranker)
            if not result.converged:
                continue
            again = direct_update(g, result.scores, ranker, weights)
            for v in g.nodes:
                assert abs(again[v] - result.scores[v]) < 1e-8

    def test_uniform_node_weight_keeps_chain_order(self, ranker):
        g = make_graph([(0, 1), (1, 2)])
        scaled = TemporalWeights(node_weights={v: 2.0 for v in g.nodes})
        ts = ranking_service.ts_lurker_rank(g, scaled, ranker)
        lr = ranking_service.lurker_rank(g, ranker)
        assert ts.ordered() == lr.ordered()


class TestTimeEvolvingLurkerRank:

    def two_interval_log(self, rng):
        users = [f"u{i}" for i in range(6)]
        rows = []
        for _ in range(30):
            a, b = rng.choice(len(users), size=2, replace=False)
            day = int(rng.integers(0, 20))
            rows.append((users[b], "post", None, f"p{len(rows)}", day))
            rows.append((users[a], "like", users[b], f"p{len(rows) - 1}", day + int(rng.integers(0, 5))))
            if rng.random() < 0.3:
                rows.append((users[a], "follow", users[b], None, day))
        return make_log(rows)

    def test_first_index_reduces_to_time_static(self, ranker):
        rng = np.random.default_rng(77)
        for _ in range(20):
            log = self.two_interval_log(rng)
            specs = snapshot_service.make_specs(log, SnapshotMode.CUMULATIVE, 12, count=2)
            graphs = [snapshot_service.build_snapshot(log, s) for s in specs]
            g0, last = graphs
            table = feature_service.build_cumulative_table(log, last.spec, last.nodes, last.edges)

            te = ranking_service.te_lurker_rank(g0, table, ranker, index=0)
            features = feature_service.interval_features(log, g0.nodes, g0.edges, g0.spec.interval, 0)
            ts = ranking_service.ts_lurker_rank(g0, features, ranker)
            assert te.algorithm == Algorithm.TE_LR
            for v in g0.nodes:
                assert abs(te.scores[v] - ts.scores[v]) < 1e-12

    def test_later_index_uses_cumulative_weights(self, ranker):
        rng = np.random.default_rng(78)
        log = self.two_interval_log(rng)
        specs = snapshot_service.make_specs(log, SnapshotMode.CUMULATIVE, 12, count=2)
        last = snapshot_service.build_snapshot(log, specs[-1])
        table = feature_service.build_cumulative_table(log, last.spec, last.nodes, last.edges)
        te = ranking_service.te_lurker_rank(last, table, ranker)
        weights = ranking_service.weights_from_table(table, 1, ranker, last.sorted_nodes, sorted(last.edges))
        for v in last.nodes:
            s = table.node(1, v)
            assert weights.node_weights[v] == node_weight(s.cf_norm, s.ca_norm, ranker)
        if te.converged:
            again = direct_update(last, te.scores, ranker, weights)
            for v in last.nodes:
                assert abs(again[v] - te.scores[v]) < 1e-8

    def test_index_out_of_table(self, ranker):
        rng = np.random.default_rng(79)
        log = self.two_interval_log(rng)
        specs = snapshot_service.make_specs(log, SnapshotMode.CUMULATIVE, 12, count=2)
        g0 = snapshot_service.build_snapshot(log, specs[0])
        table = feature_service.build_cumulative_table(log, g0.spec, g0.nodes, g0.edges)
        with pytest.raises(InvalidParameterError):
            ranking_service.te_lurker_rank(g0, table, ranker, index=1)
