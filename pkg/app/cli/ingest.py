"""`ingest`: parse an event CSV and write the normalized log plus the node table."""

import argparse
import json
import logging
import os

from app.cli.common import build_config
from app.core.exceptions import StageError
from app.services.export_service import export_service
from app.services.ingest_service import ingest_service

logger = logging.getLogger(__name__)


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    if not config.input_path:
        raise StageError("ingest", "no input path configured")
    log = ingest_service.ingest_file(config.input_path)

    await export_service.write_text(
        os.path.join(config.output_dir, "events.csv"),
        ingest_service.serialize_events(log).decode("utf-8")
    )
    await export_service.write_csv(os.path.join(config.output_dir, "nodes.csv"), ["id", "label"], enumerate(log.labels))
    print(json.dumps({
        "events": len(log.events),
        "nodes": log.node_count,
        "timespan": list(log.timespan),
        "kinds": log.kind_counts()
    }, sort_keys=True))
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("ingest", parents=parents, help="parse and normalize an event log")
    parser.set_defaults(handler=handle)
