"""`run`: the full pipeline."""

import argparse
import logging

from app.cli.common import build_config
from app.services.pipeline_service import PipelineService

logger = logging.getLogger(__name__)


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    ctx = await PipelineService(config).run()
    if ctx.errors:
        logger.error(f"{len(ctx.errors)} stage(s) failed; see {config.output_dir}/errors.json")
    return ctx.exit_code


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("run", parents=parents, help="ingest, snapshot, rank, evaluate and analyze")
    parser.set_defaults(handler=handle)
