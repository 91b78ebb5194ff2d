"""`eval`: compare LR, Ts-LR and Te-LR against the data-driven ranking."""

import argparse

from app.cli.common import build_config
from app.models.rank import Algorithm
from app.services.pipeline_service import COMPARED_ALGORITHMS, PipelineService, RunContext


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    pipeline = PipelineService(config)
    ctx = RunContext(config=config)
    await pipeline.load_log(ctx)
    await pipeline.build_graphs(ctx, write=False)
    await pipeline.rank_all(ctx, list(COMPARED_ALGORITHMS) + [Algorithm.DD], write=False)
    rows = await pipeline.evaluate(ctx)
    for row in rows:
        tau = "" if row.kendall_tau is None else f"{row.kendall_tau:.4f}"
        fagin = "" if row.fagin_at_25 is None else f"{row.fagin_at_25:.4f}"
        flag = "" if row.converged else "\tnot-converged"
        print(f"{row.snapshot_end}\t{row.algorithm}\t{tau}\t{fagin}{flag}")
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("eval", parents=parents, help="evaluate rankers against the data-driven ranking")
    parser.set_defaults(handler=handle)
