import itertools

import numpy as np
import pytest

from app.core.exceptions import InvalidParameterError
from app.models.rank import Algorithm, RankingList, RankVector
from app.models.snapshot import EdgePolicy, SnapshotSpec
from app.services.evaluation_service import evaluation_service, fagin_k
from app.services.snapshot_service import snapshot_service
from tests.conftest import make_log


def brute_kendall(first, second):
    def pairs(nodes):
        return {(a, b) for a, b in itertools.combinations(nodes, 2)}
    m = len(first)
    delta = len(pairs(first) ^ pairs(second))
    return 1.0 - 2.0 * delta / (m * (m - 1))


def brute_fagin(first, second, k):
    total = 0.0
    for q in range(1, k + 1):
        total += len(set(first[:q]) & set(second[:q])) / q
    return total / k


def ranking(*nodes):
    return RankingList(nodes=tuple(nodes))


def vector(scores, algorithm=Algorithm.LR):
    return RankVector(spec=SnapshotSpec(), algorithm=algorithm, scores=scores)


class TestKendallTau:

    def test_anchors(self):
        assert evaluation_service.kendall_tau(ranking(0, 1, 2), ranking(0, 1, 2)) == pytest.approx(1.0)
        assert evaluation_service.kendall_tau(ranking(0, 1, 2, 3), ranking(3, 2, 1, 0)) == pytest.approx(-1.0)
        assert evaluation_service.kendall_tau(ranking(0, 1, 2), ranking(0, 2, 1)) == pytest.approx(1 / 3)

    def test_brute_force(self):
        rng = np.random.default_rng(19)
        for _ in range(1000):
            m = int(rng.integers(2, 21))
            first = [int(x) for x in rng.permutation(m)]
            second = [int(x) for x in rng.permutation(m)]
            tau = evaluation_service.kendall_tau(ranking(*first), ranking(*second))
            assert tau == pytest.approx(brute_kendall(first, second), abs=1e-12)
            assert tau == pytest.approx(evaluation_service.kendall_tau(ranking(*second), ranking(*first)), abs=1e-12)

    def test_errors(self):
        with pytest.raises(InvalidParameterError):
            evaluation_service.kendall_tau(ranking(0, 1), ranking(0, 2))
        with pytest.raises(InvalidParameterError):
            evaluation_service.kendall_tau(ranking(0), ranking(0))


class TestFaginIntersection:

    def test_anchors(self):
        assert evaluation_service.fagin_intersection(ranking(0, 1), ranking(1, 0), 2) == 0.5
        assert evaluation_service.fagin_intersection(ranking(0, 1, 2), ranking(3, 4, 5), 3) == 0.0

    def test_brute_force(self):
        rng = np.random.default_rng(23)
        for _ in range(1000):
            m = int(rng.integers(2, 21))
            universe = 2 * m
            first = [int(x) for x in rng.permutation(m)]
            second = [int(x) for x in rng.choice(universe, size=m, replace=False)]
            k = int(rng.integers(1, m + 1))
            assert evaluation_service.fagin_intersection(ranking(*first), ranking(*second), k) == brute_fagin(first, second, k)
            assert evaluation_service.fagin_intersection(ranking(*first), ranking(*first), k) == 1.0

    def test_k_out_of_range(self):
        with pytest.raises(InvalidParameterError):
            evaluation_service.fagin_intersection(ranking(0, 1), ranking(0, 1), 3)
        with pytest.raises(InvalidParameterError):
            evaluation_service.fagin_intersection(ranking(0, 1), ranking(0, 1), 0)

    def test_depth(self):
        assert fagin_k(20) == 5
        assert fagin_k(3) == 1
        assert fagin_k(1, 0.1) == 1


class TestNormalizeScores:

    def test_minmax(self):
        out = evaluation_service.normalize_scores(vector({0: 1.0, 1: 3.0}))
        assert out.scores == {0: 0.0, 1: 1.0}

    def test_constant(self):
        out = evaluation_service.normalize_scores(vector({0: 2.0, 1: 2.0}))
        assert out.scores == {0: 0.5, 1: 0.5}

    def test_sum1(self):
        out = evaluation_service.normalize_scores(vector({0: 1.0, 1: 3.0}), "sum1")
        assert out.scores == {0: 0.25, 1: 0.75}

    def test_errors(self):
        with pytest.raises(InvalidParameterError):
            evaluation_service.normalize_scores(vector({}))
        with pytest.raises(InvalidParameterError):
            evaluation_service.normalize_scores(vector({0: 1.0}), "zscore")


class TestDataDrivenRank:

    @pytest.fixture
    def log(self):
        rows = [
            ("pam", "post", None, "p1", 0),
            ("pam", "post", None, "p2", 1),
            ("quin", "post", None, "q1", 1),
        ]
        rows += [("vic", "favorite", "pam", "p1", 2)] * 4
        rows += [("vic", "like", "quin", "q1", 3)] * 2
        rows += [("vic", "post", None, "v1", 4), ("vic", "post", None, "v2", 4)]
        rows += [("zoe", "favorite", "pam", "p2", 5)] * 3
        rows += [("zoe", "comment", "pam", "p2", 6)]
        rows += [("quin", "follow", "pam", None, 6), ("quin", "like", "quin", "q1", 7)]
        rows += [("pam", "like", "vic", "v1", 9)] + [("zoe", "like", "pam", "p1", 40)] * 2
        assert len(rows) == 20
        return make_log(rows)

    def test_hand_counts(self, log):
        spec = SnapshotSpec(interval_length=28, start_time=0, index=0)
        g = snapshot_service.build_snapshot(log, spec)
        dd = evaluation_service.data_driven_rank(log, g)
        by_label = {log.labels[v]: s for v, s in dd.scores.items()}
        assert dd.algorithm == Algorithm.DD
        assert by_label["vic"] == 6 / 3
        assert by_label["zoe"] == 3.0
        assert by_label["quin"] == 0.0
        assert by_label["pam"] == 1 / 3

    def test_comments_optional(self, log):
        g = snapshot_service.build_snapshot(log, SnapshotSpec(interval_length=28, start_time=0, index=0))
        dd = evaluation_service.data_driven_rank(log, g, count_comments=True)
        assert dd.scores[log.node_id("zoe")] == 4.0

    def test_followship_counts_only_followees(self):
        log = make_log([
            ("ua", "post", None, "a1", 0),
            ("ub", "post", None, "b1", 0),
            ("vee", "follow", "ua", None, 1),
            ("vee", "like", "ub", "b1", 2),
            ("vee", "like", "ua", "a1", 3),
        ])
        spec = SnapshotSpec(interval_length=28, start_time=0, index=0)
        vee = log.node_id("vee")

        follows = snapshot_service.build_snapshot(log, spec, EdgePolicy.FOLLOWSHIP)
        assert follows.in_neighbors(vee) == [log.node_id("ua")]
        assert evaluation_service.data_driven_rank(log, follows).scores[vee] == 1.0

        everything = snapshot_service.build_snapshot(log, spec, EdgePolicy.ALL)
        assert evaluation_service.data_driven_rank(log, everything).scores[vee] == 2.0

    def test_followship_without_follows_is_zero(self):
        log = make_log([("ub", "post", None, "b1", 0), ("vee", "like", "ub", "b1", 2)])
        g = snapshot_service.build_snapshot(log, SnapshotSpec(), EdgePolicy.FOLLOWSHIP)
        assert evaluation_service.data_driven_rank(log, g).scores[log.node_id("vee")] == 0.0

    def test_events_outside_window_ignored(self, log):
        g = snapshot_service.build_snapshot(log, SnapshotSpec(interval_length=28, start_time=0, index=0))
        trimmed = make_log([
            (log.labels[e.actor], e.kind.value,
             log.labels[e.target_node] if e.target_node is not None else None, e.target_post, e.timestamp)
            for e in log.events if e.timestamp <= 28
        ])
        g_trimmed = snapshot_service.build_snapshot(trimmed, SnapshotSpec(interval_length=28, start_time=0, index=0))
        full = evaluation_service.data_driven_rank(log, g).scores
        cut = evaluation_service.data_driven_rank(trimmed, g_trimmed).scores
        assert {log.labels[v]: s for v, s in full.items()} == {trimmed.labels[v]: s for v, s in cut.items()}


class TestCompare:

    def test_rows(self):
        reference = vector({0: 3.0, 1: 2.0, 2: 1.0, 3: 0.0}, Algorithm.DD)
        same = vector({0: 0.9, 1: 0.8, 2: 0.7, 3: 0.6, 9: 5.0})
        reverse = vector({0: 0.1, 1: 0.2, 2: 0.3, 3: 0.4}, Algorithm.TS_LR)
        rows = evaluation_service.compare(reference, [same, reverse], 0.5)
        assert [r.algorithm for r in rows] == ["lr", "ts-lr"]
        assert rows[0].kendall_tau == pytest.approx(1.0) and rows[0].fagin_at_25 == 1.0
        assert rows[1].kendall_tau == pytest.approx(-1.0) and rows[1].fagin_at_25 == 0.0
        assert rows[0].snapshot_end == reference.spec.window_end

    def test_non_converged_candidate_is_flagged(self, caplog):
        reference = vector({0: 3.0, 1: 2.0, 2: 1.0}, Algorithm.DD)
        runaway = RankVector(
            spec=SnapshotSpec(), algorithm=Algorithm.LR, scores={0: 9.0, 1: 5.0, 2: 1.0},
            iterations=200, residual=3.6e9, converged=False
        )
        rows = evaluation_service.compare(reference, [runaway, vector({0: 1.0, 1: 0.5, 2: 0.0}, Algorithm.TS_LR)])
        assert [r.converged for r in rows] == [False, True]
        assert rows[0].kendall_tau == pytest.approx(1.0)
        assert "did not converge" in caplog.text

    def test_missing_nodes_leave_cells_empty(self):
        reference = vector({0: 1.0, 1: 2.0}, Algorithm.DD)
        partial = vector({0: 1.0})
        row = evaluation_service.compare(reference, [partial])[0]
        assert row.kendall_tau is None and row.fagin_at_25 is None
