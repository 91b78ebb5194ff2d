"""`generate`: write a seeded synthetic event log."""

import argparse

from app.cli.common import build_config
from app.services.export_service import export_service
from app.utils.synthetic import generate_events


async def handle(args: argparse.Namespace) -> int:
    config = build_config(args)
    synthetic = generate_events(args.events, args.users, args.days, seed=config.seed)
    await export_service.write_text(args.path, synthetic.to_csv().decode("utf-8"))
    print(", ".join(f"{kind}={count}" for kind, count in sorted(synthetic.counts.items())))
    return 0


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("generate", parents=parents, help="generate a synthetic event log")
    parser.add_argument("path", help="output CSV path")
    parser.add_argument("--events", type=int, default=10000, help="number of events (default: 10000)")
    parser.add_argument("--users", type=int, default=300, help="number of users (default: 300)")
    parser.add_argument("--days", type=int, default=196, help="timespan in days (default: 196)")
    parser.set_defaults(handler=handle)
