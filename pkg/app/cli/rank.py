"""`rank`: score every snapshot with one algorithm."""

import argparse

from app.cli.common import build_config
from app.models.rank import Algorithm
from app.services.pipeline_service import PipelineService, RunContext


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    algorithm = Algorithm(args.algo)
    pipeline = PipelineService(config)
    ctx = RunContext(config=config)
    await pipeline.load_log(ctx)
    await pipeline.build_graphs(ctx, write=False)
    await pipeline.rank_all(ctx, [algorithm])

    unconverged = [
        r.index for r in ctx.ranks
        if not r.vectors[algorithm].converged
    ]
    print(f"{algorithm.value}: ranked {len(ctx.ranks)} snapshots, {len(unconverged)} not converged")
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("rank", parents=parents, help="rank snapshots with one algorithm")
    parser.add_argument(
        "--algo", choices=[a.value for a in Algorithm], default=Algorithm.LR.value,
        help="ranking algorithm (default: lr)"
    )
    parser.set_defaults(handler=handle)
