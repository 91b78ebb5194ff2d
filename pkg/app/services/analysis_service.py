"""Behavioral analyses of lurkers: categories, overlaps, attachment, responsiveness and trends."""

import logging
import math
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import optimize, special, stats

from app.core.exceptions import FitError, InvalidParameterError
from app.models.analysis import (
    AnalysisReport,
    AttachmentSeries,
    Ecdf,
    FuzzyClustering,
    PowerLawFit,
    ScoreTimeSeries,
    UserCategorySnapshot,
)
from app.models.event import CONSUMPTION_KINDS, ActionKind, EventLog
from app.models.rank import RankVector
from app.models.snapshot import SnapshotGraph
from app.services.evaluation_service import evaluation_service

logger = logging.getLogger(__name__)

CONTRIBUTION_KINDS = CONSUMPTION_KINDS | {ActionKind.POST}
ATTACHMENT_MODES = ("received-by-active", "produced-by-lurkers")
MIN_POWER_LAW_SAMPLES = 50


def _check_fraction(p: float) -> None:
    if not 0 < p <= 1:
        raise InvalidParameterError(f"fraction must lie in (0, 1], got {p}")


def _power_law_cdf(x: np.ndarray, alpha: float, x_min: int) -> np.ndarray:
    """Discrete power-law P(X <= x) for x >= x_min."""
    return 1.0 - special.zeta(alpha, x + 1) / special.zeta(alpha, x_min)


class AnalysisService:
    """Service for the behavioral analyses run on ranked snapshots."""

    def classify_users(
        self,
        log: EventLog,
        g: SnapshotGraph,
        rank: RankVector,
        p: float = 0.25,
        zero_scope: str = "history"
    ) -> UserCategorySnapshot:
        """Category sets of g's nodes using only events up to the window end.

        Potential lurkers have raw in/out-degree ratio above one, sinks included.
        Zero-contributors never posted, commented or favorited/liked within
        `zero_scope` ("history" from the log start, or "window").
        Newcomers had their first interaction with another user inside the window.
        """
        _check_fraction(p)
        if zero_scope not in ("history", "window"):
            raise InvalidParameterError(f"zero-contributor scope must be history or window, got {zero_scope}")

        start, end = g.spec.window_start, g.spec.window_end
        scope_start = log.t_min if zero_scope == "history" else start
        times = log.times

        potential: Set[int] = set()
        zero: Set[int] = set()
        newcomers: Set[int] = set()
        for v in g.sorted_nodes:
            indeg, outdeg = g.graph.in_degree(v), g.graph.out_degree(v)
            if (outdeg == 0 and indeg > 0) or (outdeg > 0 and indeg / outdeg > 1):
                potential.add(v)

            contributed = any(
                scope_start <= times[pos] <= end and log.events[pos].kind in CONTRIBUTION_KINDS
                for pos in log.actions_by_actor.get(v, ())
            )
            if not contributed:
                zero.add(v)

            first = log.first_interaction.get(v)
            if first is not None and start <= first <= end:
                newcomers.add(v)

        ranked = rank.restrict(g.nodes)
        return UserCategorySnapshot(
            index=g.spec.index,
            fraction=p,
            potential_lurkers=frozenset(potential),
            zero_contributors=frozenset(zero),
            newcomers=frozenset(newcomers),
            top_lurkers=frozenset(ranked.top(p)),
            active_users=frozenset(ranked.bottom(p))
        )

    @staticmethod
    def overlap_ratio(a: Iterable[int], b: Iterable[int], denom: str = "B") -> float:
        """|A & B| / |A| or / |B|."""
        a, b = set(a), set(b)
        if denom not in ("A", "B"):
            raise InvalidParameterError(f"denominator must be A or B, got {denom}")
        base = a if denom == "A" else b
        if not base:
            raise InvalidParameterError(f"overlap ratio denominator set {denom} is empty")
        return len(a & b) / len(base)

    def safe_overlap(self, a: Iterable[int], b: Iterable[int], denom: str = "B") -> Optional[float]:
        try:
            return self.overlap_ratio(a, b, denom)
        except InvalidParameterError:
            return None

    def preferential_attachment_series(
        self,
        graphs: Sequence[SnapshotGraph],
        categories: Sequence[UserCategorySnapshot],
        mode: str = "received-by-active"
    ) -> AttachmentSeries:
        """Average new qualifying links per user and week, as a function of k.

        `graphs` are consecutive cumulative weekly graphs and `categories` the
        classification at each week. For week w, received-by-active counts for
        each active user its lurker-followers k and the links from those lurkers
        first created in week w+1; produced-by-lurkers counts for each lurker its
        active followees k and its new links to those active users.
        """
        if mode not in ATTACHMENT_MODES:
            raise InvalidParameterError(f"attachment mode must be one of {', '.join(ATTACHMENT_MODES)}, got {mode}")
        if len(graphs) < 2 or len(graphs) != len(categories):
            raise InvalidParameterError("preferential attachment needs at least 2 aligned weekly windows")

        totals: Dict[int, List[int]] = {}
        for w in range(len(graphs) - 1):
            current, following = graphs[w].graph, graphs[w + 1].graph
            cut = graphs[w].spec.window_end
            lurkers, active = categories[w].top_lurkers, categories[w].active_users

            if mode == "received-by-active":
                for a in sorted(active):
                    k = sum(1 for l in current.successors(a) if l in lurkers) if current.has_node(a) else 0
                    new = 0
                    if following.has_node(a):
                        new = sum(
                            1 for l in following.successors(a)
                            if l in lurkers and following.edges[a, l]["first_ts"] > cut
                        )
                    totals.setdefault(k, []).append(new)
            else:
                for l in sorted(lurkers):
                    k = sum(1 for a in current.predecessors(l) if a in active) if current.has_node(l) else 0
                    new = 0
                    if following.has_node(l):
                        new = sum(
                            1 for a in following.predecessors(l)
                            if a in active and following.edges[a, l]["first_ts"] > cut
                        )
                    totals.setdefault(k, []).append(new)

        points = tuple((k, float(np.mean(values))) for k, values in sorted(totals.items()))
        if len(points) < 2:
            raise FitError(f"preferential attachment fit needs at least 2 distinct k values, got {len(points)}")

        ks = np.array([k for k, _ in points], dtype=float)
        gains = np.array([y for _, y in points], dtype=float)
        fit = stats.linregress(ks, gains)
        if np.ptp(gains) == 0:
            logger.warning(f"Attachment gains are constant over k ({mode}); correlation undefined")
            correlation = float("nan")
        else:
            correlation = float(stats.pearsonr(ks, gains)[0])

        logger.info(f"Attachment {mode}: {len(points)} k values, slope {fit.slope:.5f}, r {correlation:.3f}")
        return AttachmentSeries(
            mode=mode,
            points=points,
            observations=sum(len(v) for v in totals.values()),
            slope=float(fit.slope),
            intercept=float(fit.intercept),
            correlation=correlation
        )

    @staticmethod
    def attachment_degree_samples(g: SnapshotGraph, categories: UserCategorySnapshot) -> Dict[str, List[int]]:
        """Lurker-followers per active user and active followees per lurker (zero degrees dropped)."""
        lurkers, active = categories.top_lurkers, categories.active_users
        per_active = [sum(1 for l in g.graph.successors(a) if l in lurkers) for a in sorted(active)]
        per_lurker = [sum(1 for a in g.graph.predecessors(l) if a in active) for l in sorted(lurkers)]
        return {
            "lurkers_per_active": [k for k in per_active if k > 0],
            "active_per_lurker": [k for k in per_lurker if k > 0]
        }

    def power_law_fit(
        self,
        samples: Sequence[int],
        x_min: Optional[int] = None,
        method: str = "exact"
    ) -> PowerLawFit:
        """Discrete power-law fit with KS statistic; `x_min=None` picks the KS-minimizing cutoff.

        `exact` maximizes the Hurwitz-zeta likelihood; `approximate` uses
        alpha = 1 + n / sum(ln(x / (x_min - 0.5))).
        """
        if method not in ("exact", "approximate"):
            raise InvalidParameterError(f"unknown power-law method: {method}")
        data = np.asarray(samples, dtype=np.int64)
        if data.size == 0 or np.any(data < 1):
            raise FitError("power-law samples must be positive integers")
        if np.unique(data).size < 2:
            raise FitError("power-law fit is degenerate: all samples are equal")

        if x_min is not None:
            if x_min < 1:
                raise InvalidParameterError(f"x_min must be >= 1, got {x_min}")
            return self._fit_tail(data, int(x_min), method)

        best: Optional[PowerLawFit] = None
        for candidate in np.unique(data):
            tail = data[data >= candidate]
            if tail.size < MIN_POWER_LAW_SAMPLES or np.unique(tail).size < 2:
                continue
            fit = self._fit_tail(data, int(candidate), method)
            if best is None or fit.ks_statistic < best.ks_statistic:
                best = fit
        if best is None:
            raise FitError(f"no x_min leaves {MIN_POWER_LAW_SAMPLES} non-degenerate tail samples")
        return best

    @staticmethod
    def _fit_tail(data: np.ndarray, x_min: int, method: str) -> PowerLawFit:
        tail = data[data >= x_min].astype(float)
        n = tail.size
        if n < MIN_POWER_LAW_SAMPLES:
            raise FitError(f"power-law fit needs {MIN_POWER_LAW_SAMPLES} samples >= x_min={x_min}, got {n}")
        if np.unique(tail).size < 2:
            raise FitError(f"power-law tail above x_min={x_min} is degenerate")

        log_sum = float(np.sum(np.log(tail)))
        approx = 1.0 + n / float(np.sum(np.log(tail / (x_min - 0.5))))
        alpha = approx
        if method == "exact":
            result = optimize.minimize_scalar(
                lambda a: a * log_sum + n * math.log(special.zeta(a, x_min)),
                bounds=(1.0 + 1e-6, max(10.0, 2.0 * approx)),
                method="bounded",
                options={"xatol": 1e-10}
            )
            if not result.success:
                raise FitError(f"power-law likelihood maximization failed: {result.message}")
            alpha = float(result.x)

        values = np.unique(tail)
        empirical = np.searchsorted(np.sort(tail), values, side="right") / n
        ks = float(np.max(np.abs(empirical - _power_law_cdf(values, alpha, x_min))))
        return PowerLawFit(alpha=alpha, x_min=x_min, ks_statistic=ks, n_tail=n, method=method)

    @staticmethod
    def ecdf_from_latencies(latencies: Iterable[int], horizon: int = 90) -> Ecdf:
        """Step ECDF of the latencies within [0, horizon]."""
        kept = np.sort(np.asarray([x for x in latencies if 0 <= x <= horizon], dtype=np.int64))
        if kept.size == 0:
            return Ecdf(horizon=horizon)
        values, counts = np.unique(kept, return_counts=True)
        fractions = np.cumsum(counts) / kept.size
        return Ecdf(
            points=tuple((int(x), float(f)) for x, f in zip(values, fractions)),
            sample_size=int(kept.size),
            horizon=horizon
        )

    def response_latencies(self, log: EventLog, group: Iterable[int], until: Optional[int] = None) -> List[int]:
        """Day gaps between consecutive responsive actions of each member.

        A responsive action is a favorite, like or comment on the content of a
        user the actor already follows at that time.
        """
        follow_since: Dict[Tuple[int, int], int] = {}
        for event in log.events:
            if event.kind == ActionKind.FOLLOW and event.target_node != event.actor:
                follow_since.setdefault((event.actor, event.target_node), event.timestamp)

        latencies: List[int] = []
        for v in sorted(set(group)):
            days = []
            for pos in log.actions_by_actor.get(v, ()):
                event = log.events[pos]
                if until is not None and event.timestamp > until:
                    break
                if not event.is_consumption or event.target_node == v:
                    continue
                since = follow_since.get((v, event.target_node))
                if since is not None and since <= event.timestamp:
                    days.append(event.timestamp)
            latencies.extend(int(b - a) for a, b in zip(days, days[1:]))
        return latencies

    def responsiveness_ecdf(
        self,
        log: EventLog,
        group: Iterable[int],
        horizon: int = 90,
        until: Optional[int] = None
    ) -> Ecdf:
        ecdf = self.ecdf_from_latencies(self.response_latencies(log, group, until), horizon)
        if ecdf.empty:
            logger.warning("No qualifying response latencies in group; ECDF is empty")
        return ecdf

    def build_score_series(
        self,
        vectors: Sequence[RankVector],
        p: float = 0.25,
        min_presence: float = 0.5
    ) -> List[ScoreTimeSeries]:
        """Normalized score trajectories of the top-p lurkers of the first snapshot.

        Users must appear in at least `min_presence` of the later snapshots; gaps
        are linearly interpolated. Zero-variance trajectories are dropped.
        """
        _check_fraction(p)
        if len(vectors) < 2:
            raise InvalidParameterError("score series need at least 2 snapshots")

        normalized = [evaluation_service.normalize_scores(v, "minmax").scores for v in vectors]
        selected = sorted(vectors[0].top(p))
        later = normalized[1:]
        steps = np.arange(len(normalized))

        series: List[ScoreTimeSeries] = []
        dropped = 0
        for v in selected:
            present = sum(1 for scores in later if v in scores)
            if present < min_presence * len(later):
                continue
            known = [(i, scores[v]) for i, scores in enumerate(normalized) if v in scores]
            values = np.interp(steps, [i for i, _ in known], [s for _, s in known])
            sd = float(np.std(values))
            if sd == 0:
                dropped += 1
                continue
            series.append(ScoreTimeSeries(node=v, values=values, standardized=(values - values.mean()) / sd))

        if dropped:
            logger.warning(f"Excluded {dropped} zero-variance lurking series from clustering")
        logger.info(f"Built {len(series)} lurking series from {len(selected)} top lurkers")
        return series

    def cluster_lurking_series(
        self,
        series: Sequence[ScoreTimeSeries],
        c: int = 4,
        m: float = 1.25,
        tol: float = 1e-9,
        max_iter: int = 300,
        seed: int = 42
    ) -> FuzzyClustering:
        """Fuzzy c-means on the standardized series (Euclidean distance)."""
        if c < 2:
            raise InvalidParameterError(f"cluster count must be >= 2, got {c}")
        if m <= 1:
            raise InvalidParameterError(f"fuzzifier must be > 1, got {m}")
        if c >= len(series):
            raise InvalidParameterError(f"cluster count {c} must be below the number of series {len(series)}")
        lengths = {len(s.standardized) for s in series}
        if len(lengths) != 1 or lengths.pop() < 2:
            raise InvalidParameterError("series must share one length >= 2")

        data = np.vstack([s.standardized for s in series])
        rng = np.random.default_rng(seed)
        memberships = rng.dirichlet(np.ones(c), size=len(series))
        exponent = 2.0 / (m - 1.0)

        history: List[float] = []
        centroids = np.zeros((c, data.shape[1]))
        iterations = 0
        for iterations in range(1, max_iter + 1):
            weights = memberships ** m
            centroids = (weights.T @ data) / weights.sum(axis=0)[:, None]
            distances = np.linalg.norm(data[:, None, :] - centroids[None, :, :], axis=2)
            objective = float(np.sum(weights * distances ** 2))
            history.append(objective)
            memberships = self._update_memberships(distances, exponent)
            if len(history) > 1 and history[-2] - objective < tol:
                break

        logger.info(f"Fuzzy c-means: {len(series)} series, c={c}, m={m}, {iterations} iterations")
        return FuzzyClustering(
            clusters=c,
            fuzzifier=m,
            nodes=tuple(s.node for s in series),
            memberships=memberships,
            centroids=centroids,
            objective=history[-1],
            objective_history=tuple(history),
            iterations=iterations
        )

    @staticmethod
    def _update_memberships(distances: np.ndarray, exponent: float) -> np.ndarray:
        """u_ij = 1 / sum_k (d_ij / d_ik)^exponent; a zero distance takes the whole membership."""
        out = np.zeros_like(distances)
        for i, row in enumerate(distances):
            zero = row == 0
            if zero.any():
                out[i, zero] = 1.0 / zero.sum()
                continue
            logs = np.log(row)
            with np.errstate(over="ignore"):
                ratios = np.exp(exponent * (logs[:, None] - logs[None, :]))
            out[i] = 1.0 / ratios.sum(axis=1)
        return out

    def top_sets(self, rank: RankVector, nodes: Iterable[int], fractions: Sequence[float]) -> Dict[float, FrozenSet[int]]:
        ranked = rank.restrict(nodes)
        return {p: frozenset(ranked.top(p)) for p in fractions}

    # Reports

    def overlap_report(
        self,
        log: EventLog,
        graphs: Sequence[SnapshotGraph],
        ranks: Sequence[RankVector],
        p: float = 0.25,
        zero_scope: str = "history"
    ) -> AnalysisReport:
        """Zero-contributor overlap ratio against potential, top-5% and top-p% lurkers per snapshot."""
        report = AnalysisReport(
            name="overlap",
            columns=[
                "index", "window_end", "potential_lurkers", "zero_contributors",
                "zc_vs_potential", "zc_vs_top5", "zc_vs_top_p"
            ],
            summary={"fraction": p, "zero_contributor_scope": zero_scope}
        )
        for g, rank in zip(graphs, ranks):
            if g.is_empty:
                report.warnings.append(f"{g.spec.name} is empty")
                continue
            cats = self.classify_users(log, g, rank, p, zero_scope)
            top5 = frozenset(rank.restrict(g.nodes).top(0.05))
            zc = cats.zero_contributors
            report.rows.append([
                g.spec.index,
                g.spec.window_end,
                len(cats.potential_lurkers),
                len(zc),
                self.safe_overlap(zc, cats.potential_lurkers),
                self.safe_overlap(zc, top5),
                self.safe_overlap(zc, cats.top_lurkers)
            ])
        return report

    def newcomer_report(
        self,
        log: EventLog,
        graphs: Sequence[SnapshotGraph],
        ranks: Sequence[RankVector],
        p: float = 0.25
    ) -> AnalysisReport:
        """Newcomers recognized as lurkers and lurkers that are newcomers, per snapshot and top fraction."""
        fractions = sorted({0.05, 0.10, p})
        report = AnalysisReport(
            name="newcomers",
            columns=["index", "window_end", "fraction", "newcomers", "lurkers", "newcomers_as_lurkers", "lurkers_as_newcomers"],
            summary={"fractions": fractions}
        )
        for g, rank in zip(graphs, ranks):
            if g.is_empty:
                report.warnings.append(f"{g.spec.name} is empty")
                continue
            newcomers = self.classify_users(log, g, rank, p).newcomers
            for q, lurkers in sorted(self.top_sets(rank, g.nodes, fractions).items()):
                report.rows.append([
                    g.spec.index,
                    g.spec.window_end,
                    q,
                    len(newcomers),
                    len(lurkers),
                    self.safe_overlap(newcomers, lurkers, denom="A"),
                    self.safe_overlap(newcomers, lurkers, denom="B")
                ])
        return report

    def attachment_report(
        self,
        log: EventLog,
        graphs: Sequence[SnapshotGraph],
        ranks: Sequence[RankVector],
        p: float = 0.25
    ) -> AnalysisReport:
        """Preferential attachment in both modes over weekly cumulative graphs, plus static power-law fits."""
        report = AnalysisReport(name="prefattach", columns=["mode", "k", "avg_new_links"], summary={"fraction": p})
        categories = [self.classify_users(log, g, r, p) for g, r in zip(graphs, ranks) if not g.is_empty]
        weekly = [g for g in graphs if not g.is_empty]

        for mode in ATTACHMENT_MODES:
            try:
                series = self.preferential_attachment_series(weekly, categories, mode)
            except (FitError, InvalidParameterError) as e:
                report.warnings.append(f"{mode}: {e.detail}")
                logger.warning(f"Skipping attachment fit {mode}: {e.detail}")
                continue
            report.rows.extend([mode, k, y] for k, y in series.points)
            report.summary[mode] = {
                "slope": series.slope,
                "intercept": series.intercept,
                "correlation": None if math.isnan(series.correlation) else series.correlation,
                "observations": series.observations
            }

        if weekly:
            samples = self.attachment_degree_samples(weekly[-1], categories[-1])
            for name, values in samples.items():
                try:
                    fit = self.power_law_fit(values)
                except FitError as e:
                    report.warnings.append(f"power law {name}: {e.detail}")
                    logger.warning(f"Skipping power-law fit {name}: {e.detail}")
                    continue
                report.summary[f"power_law_{name}"] = fit.model_dump()
        return report

    def responsiveness_report(
        self,
        log: EventLog,
        g: SnapshotGraph,
        rank: RankVector,
        p: float = 0.25,
        horizon: int = 90
    ) -> AnalysisReport:
        """Response-latency ECDFs of top-5% lurkers, top-p% lurkers and all users of `g`."""
        report = AnalysisReport(
            name="responsiveness",
            columns=["group", "latency_days", "cumulative_fraction"],
            summary={"fraction": p, "horizon": horizon}
        )
        tops = self.top_sets(rank, g.nodes, [0.05, p])
        groups = [("top5", tops[0.05]), ("top_p", tops[p]), ("all", g.nodes)]
        for name, members in groups:
            ecdf = self.responsiveness_ecdf(log, members, horizon, until=g.spec.window_end)
            report.summary[f"{name}_samples"] = ecdf.sample_size
            if ecdf.empty:
                report.warnings.append(f"group {name} has no response latencies")
            report.rows.extend([name, x, y] for x, y in ecdf.points)
        return report

    def cluster_report(
        self,
        log: EventLog,
        vectors: Sequence[RankVector],
        p: float = 0.25,
        c: int = 4,
        m: float = 1.25,
        tol: float = 1e-9,
        max_iter: int = 300,
        seed: int = 42
    ) -> AnalysisReport:
        report = AnalysisReport(
            name="cluster",
            columns=["node"] + [f"cluster_{j}" for j in range(c)] + ["dominant"],
            summary={"clusters": c, "fuzzifier": m, "seed": seed}
        )
        try:
            series = self.build_score_series(vectors, p)
            clustering = self.cluster_lurking_series(series, c, m, tol, max_iter, seed)
        except InvalidParameterError as e:
            report.skipped = e.detail
            logger.warning(f"Skipping clustering: {e.detail}")
            return report

        dominant = clustering.dominant_cluster()
        for node, row in zip(clustering.nodes, clustering.memberships):
            report.rows.append([log.labels[node]] + [float(x) for x in row] + [dominant[node]])
        report.summary.update({
            "series": len(clustering.nodes),
            "objective": clustering.objective,
            "iterations": clustering.iterations,
            "centroids": clustering.centroids.tolist()
        })
        return report


# Singleton instance
analysis_service = AnalysisService()
