"""`analyze`: run one behavioral analysis."""

import argparse

from app.cli.common import build_config
from app.models.rank import Algorithm
from app.schemas.run_config import ANALYSIS_NAMES
from app.services.pipeline_service import PipelineService, RunContext


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args, analyses=[args.analysis])
    pipeline = PipelineService(config)
    ctx = RunContext(config=config)
    await pipeline.load_log(ctx)
    await pipeline.build_graphs(ctx, write=False)
    await pipeline.rank_all(ctx, [Algorithm.LR], write=False)
    report = await pipeline.analyze(ctx, args.analysis)
    if report.skipped:
        print(f"{report.name}: skipped ({report.skipped})")
    else:
        print(f"{report.name}: {len(report.rows)} rows, {len(report.warnings)} warnings")
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("analyze", parents=parents, help="run a behavioral analysis")
    parser.add_argument("analysis", choices=ANALYSIS_NAMES)
    parser.set_defaults(handler=handle)
