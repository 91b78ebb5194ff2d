"""Subcommand aggregation."""

import argparse

from app.cli import analyze, evaluate, generate, ingest, rank, run, snapshot
from app.cli.common import common_parser
from app.core.config import settings

COMMANDS = [ingest, snapshot, rank, evaluate, analyze, run, generate]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lurkscope",
        description=f"{settings.APP_NAME} {settings.APP_VERSION}: temporal lurker ranking and behavioral analysis"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_parser()]

    # Register all subcommands
    for command in COMMANDS:
        command.register(subparsers, parents)
    return parser
