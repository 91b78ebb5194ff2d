"""End-to-end run orchestration: ingest, snapshots, features, ranking, evaluation, analyses."""

import asyncio
import logging
import os
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.core.exceptions import LurkScopeError, StageError
from app.models.analysis import AnalysisReport
from app.models.event import EventLog
from app.models.features import CumulativeScoreTable
from app.models.rank import Algorithm, RankVector
from app.models.snapshot import SnapshotGraph, SnapshotMode, SnapshotSpec
from app.schemas.rows import EvaluationRow
from app.schemas.run_config import RunConfig
from app.services.analysis_service import analysis_service
from app.services.evaluation_service import evaluation_service
from app.services.export_service import SNAPSHOT_COLUMNS, export_service
from app.services.feature_service import FEATURE_COLUMNS, FeatureService
from app.services.ingest_service import ingest_service
from app.services.ranking_service import ranking_service
from app.services.snapshot_service import snapshot_service

logger = logging.getLogger(__name__)

T = TypeVar("T")

COMPARED_ALGORITHMS = (Algorithm.LR, Algorithm.TS_LR, Algorithm.TE_LR)


class SnapshotRanks(BaseModel):
    """All rank vectors of one snapshot index, restricted to the configured snapshot's nodes."""
    model_config = ConfigDict(frozen=True)

    index: int
    vectors: Dict[Algorithm, RankVector]


class RunContext(BaseModel):
    """Intermediate products of a run shared between stages."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: RunConfig
    log: Optional[EventLog] = None
    graphs: List[SnapshotGraph] = []
    cumulative: List[SnapshotGraph] = []
    table: Optional[CumulativeScoreTable] = None
    ranks: List[SnapshotRanks] = []
    evaluation: List[EvaluationRow] = []
    stages: Dict[str, str] = {}
    errors: List[dict] = []

    @property
    def exit_code(self) -> int:
        return 1 if self.errors else 0


class PipelineService:
    """Service running the batch pipeline over one event log."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.out_dir = config.output_dir
        self.features = FeatureService(config.dsa_epsilon, config.dsa_epsilon_scale)
        self._semaphore: Optional[asyncio.Semaphore] = None

    async def _bounded(self, fn: Callable[..., T], *args) -> T:
        if self._semaphore is None:
            self._semaphore = asyncio.Semaphore(self.config.jobs)
        async with self._semaphore:
            return await asyncio.to_thread(fn, *args)

    async def _map(self, fn: Callable[..., T], items: Sequence) -> List[T]:
        """Apply fn to every item under the jobs bound; results keep input order."""
        return list(await asyncio.gather(*(self._bounded(fn, item) for item in items)))

    def _path(self, *parts: str) -> str:
        return os.path.join(self.out_dir, *parts)

    # Stages

    async def load_log(self, ctx: RunContext) -> EventLog:
        if not self.config.input_path:
            raise StageError("ingest", "no input path configured")
        ctx.log = await asyncio.to_thread(ingest_service.ingest_file, self.config.input_path)
        await export_service.write_csv(
            self._path("nodes.csv"), ["id", "label"], enumerate(ctx.log.labels)
        )
        return ctx.log

    def specs(self, log: EventLog, mode: SnapshotMode, interval_days: Optional[int] = None) -> List[SnapshotSpec]:
        cfg = self.config
        interval = interval_days or cfg.interval_days
        count = cfg.snapshot_count if interval_days is None else None
        return snapshot_service.make_specs(log, mode, interval, cfg.start_time, count)

    async def build_graphs(self, ctx: RunContext, write: bool = True) -> None:
        cfg = self.config
        log = ctx.log

        def build(spec: SnapshotSpec) -> SnapshotGraph:
            return snapshot_service.build_snapshot(log, spec, cfg.edge_policy, cfg.follow_carryover)

        ctx.graphs = await self._map(build, self.specs(log, cfg.snapshot_mode))
        if cfg.snapshot_mode == SnapshotMode.CUMULATIVE:
            ctx.cumulative = ctx.graphs
        else:
            ctx.cumulative = await self._map(build, self.specs(log, SnapshotMode.CUMULATIVE))
        logger.info(f"Built {len(ctx.graphs)} {cfg.snapshot_mode.value} snapshots")

        if write:
            for g in ctx.graphs:
                await export_service.write_csv(
                    self._path("snapshots", f"{g.spec.name}.csv"),
                    SNAPSHOT_COLUMNS,
                    snapshot_service.edge_rows(g, log)
                )

    async def build_table(self, ctx: RunContext, write: bool = True) -> CumulativeScoreTable:
        last = ctx.cumulative[-1]
        ctx.table = await asyncio.to_thread(
            self.features.build_cumulative_table,
            ctx.log, last.spec, last.nodes, last.edges, self.config.acausal_normalization
        )
        if write:
            for i in range(len(ctx.table.intervals)):
                await export_service.write_csv(
                    self._path("features", f"features_{i:03d}.csv"),
                    FEATURE_COLUMNS,
                    self.features.feature_rows(ctx.table, i, ctx.log)
                )
        return ctx.table

    def rank_index(self, ctx: RunContext, i: int, algorithms: Sequence[Algorithm]) -> Optional[SnapshotRanks]:
        g = ctx.graphs[i]
        if g.is_empty:
            logger.warning(f"Snapshot {g.spec.name} is empty; skipping ranking")
            return None
        cfg = self.config
        ranker = cfg.ranker_config()
        vectors: Dict[Algorithm, RankVector] = {}
        for algorithm in algorithms:
            if algorithm == Algorithm.LR:
                vectors[algorithm] = ranking_service.lurker_rank(g, ranker)
            elif algorithm == Algorithm.TS_LR:
                feats = self.features.interval_features(ctx.log, g.nodes, g.edges, g.spec.interval, i)
                vectors[algorithm] = ranking_service.ts_lurker_rank(g, feats, ranker)
            elif algorithm == Algorithm.TE_LR:
                te = ranking_service.te_lurker_rank(ctx.cumulative[i], ctx.table, ranker, index=i)
                vectors[algorithm] = te.restrict(g.nodes)
            else:
                vectors[algorithm] = evaluation_service.data_driven_rank(ctx.log, g, cfg.dd_count_comments)
        return SnapshotRanks(index=i, vectors=vectors)

    async def rank_all(self, ctx: RunContext, algorithms: Sequence[Algorithm], write: bool = True) -> None:
        if Algorithm.TE_LR in algorithms and ctx.table is None:
            await self.build_table(ctx, write=write)
        results = await self._map(lambda i: self.rank_index(ctx, i, algorithms), range(len(ctx.graphs)))
        ctx.ranks = [r for r in results if r is not None]
        if write:
            for r in ctx.ranks:
                for vector in r.vectors.values():
                    await export_service.export_rank(self.out_dir, vector, ctx.log, r.index)

    async def evaluate(self, ctx: RunContext, write: bool = True) -> List[EvaluationRow]:
        rows: List[EvaluationRow] = []
        for r in ctx.ranks:
            reference = r.vectors[Algorithm.DD]
            candidates = [r.vectors[a] for a in COMPARED_ALGORITHMS if a in r.vectors]
            rows.extend(evaluation_service.compare(reference, candidates, self.config.top_frac))
        ctx.evaluation = rows
        if write:
            await export_service.export_evaluation(self._path("evaluation.csv"), rows)
        return rows

    async def analyze(self, ctx: RunContext, name: str) -> AnalysisReport:
        cfg = self.config
        log = ctx.log
        lr = [r.vectors[Algorithm.LR] for r in ctx.ranks]
        ranked_graphs = [ctx.graphs[r.index] for r in ctx.ranks]
        ranker = cfg.ranker_config()

        if name == "overlap":
            report = analysis_service.overlap_report(
                log, ranked_graphs, lr, cfg.category_frac, cfg.zero_contributor_scope
            )
        elif name == "newcomers":
            report = analysis_service.newcomer_report(log, ranked_graphs, lr, cfg.category_frac)
        elif name == "prefattach":
            def build_week(spec: SnapshotSpec) -> SnapshotGraph:
                return snapshot_service.build_snapshot(log, spec, cfg.edge_policy)

            weekly = await self._map(
                build_week, self.specs(log, SnapshotMode.CUMULATIVE, cfg.analysis_interval_days)
            )
            weekly = [g for g in weekly if not g.is_empty]
            weekly_lr = await self._map(lambda g: ranking_service.lurker_rank(g, ranker), weekly)
            report = analysis_service.attachment_report(log, weekly, weekly_lr, cfg.category_frac)
        elif name == "responsiveness":
            last = ctx.cumulative[-1]
            rank = await asyncio.to_thread(ranking_service.lurker_rank, last, ranker)
            report = analysis_service.responsiveness_report(log, last, rank, cfg.category_frac, cfg.ecdf_horizon)
        elif name == "cluster":
            report = analysis_service.cluster_report(
                log, lr, cfg.category_frac, cfg.fcm_clusters, cfg.fcm_fuzzifier,
                cfg.fcm_tolerance, cfg.fcm_max_iter, cfg.seed
            )
        else:
            raise StageError(f"analysis.{name}", "unknown analysis")

        for warning in report.warnings:
            logger.warning(f"Analysis {name}: {warning}")
        await export_service.export_report(self.out_dir, report)
        return report

    # Orchestration

    async def _stage(self, ctx: RunContext, name: str, coro) -> bool:
        try:
            await coro
            ctx.stages[name] = "ok"
            return True
        except LurkScopeError as e:
            logger.error(f"Stage {name} failed: {e.detail}")
            ctx.stages[name] = "failed"
            ctx.errors.append({"stage": name, **e.to_dict()})
            return False

    async def run(self) -> RunContext:
        """Run every stage. Ingest failures propagate; later failures are recorded and skipped."""
        cfg = self.config
        ctx = RunContext(config=cfg)
        os.makedirs(self.out_dir, exist_ok=True)
        logger.info(f"Starting run into {self.out_dir} (config {cfg.config_hash()[:12]}, seed {cfg.seed})")

        await self.load_log(ctx)
        ctx.stages["ingest"] = "ok"

        if await self._stage(ctx, "snapshots", self.build_graphs(ctx)):
            if await self._stage(ctx, "features", self.build_table(ctx)):
                algorithms = list(COMPARED_ALGORITHMS) + [Algorithm.DD]
                if await self._stage(ctx, "ranking", self.rank_all(ctx, algorithms)):
                    await self._stage(ctx, "evaluation", self.evaluate(ctx))
                    for name in cfg.analyses:
                        await self._stage(ctx, f"analysis.{name}", self.analyze(ctx, name))

        await self.write_manifest(ctx)
        if ctx.errors:
            export_service.write_errors(self.out_dir, ctx.errors)
        logger.info(f"Run finished with {len(ctx.errors)} failed stage(s)")
        return ctx

    async def write_manifest(self, ctx: RunContext) -> str:
        cfg = self.config
        return await export_service.write_json(self._path("manifest.json"), {
            "app": settings.APP_NAME,
            "version": settings.APP_VERSION,
            "config": cfg.model_dump(mode="json", exclude={"output_dir"}),
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "snapshots": [g.spec.name for g in ctx.graphs],
            "stages": ctx.stages,
            "unconverged": [
                {"snapshot_end": row.snapshot_end, "algorithm": row.algorithm}
                for row in ctx.evaluation if not row.converged
            ]
        })
