"""`snapshot`: materialize snapshot graphs as edge lists."""

import argparse

from app.cli.common import build_config
from app.services.pipeline_service import PipelineService, RunContext


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    pipeline = PipelineService(config)
    ctx = RunContext(config=config)
    await pipeline.load_log(ctx)
    await pipeline.build_graphs(ctx)
    for g in ctx.graphs:
        flag = " (disjoint)" if g.disjoint else ""
        print(f"{g.spec.name} [{g.spec.window_start}, {g.spec.window_end}] "
              f"{g.graph.number_of_nodes()} nodes {g.graph.number_of_edges()} edges{flag}")
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("snapshot", parents=parents, help="build transient or cumulative snapshots")
    parser.set_defaults(handler=handle)
