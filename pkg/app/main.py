"""Command-line entry point: `python -m app.main <command> [options]`."""

import asyncio
import logging
import sys
from typing import List, Optional

from app.cli.router import build_parser
from app.core.config import settings
from app.core.exceptions import ConfigError, LurkScopeError
from app.services.export_service import export_service

logger = logging.getLogger(__name__)


def configure_logging(debug: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if debug or settings.DEBUG else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )
    # Reduce verbose logging from third-party libraries
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)
    logging.getLogger("asyncio").setLevel(logging.WARNING)


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; exit 0 on success, 1 on partial failure, 2 on config or fatal errors."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.debug)
    out_dir = getattr(args, "output_dir", None) or settings.OUTPUT_DIR

    try:
        return asyncio.run(args.handler(args))
    except ConfigError as e:
        logger.error(f"Configuration rejected: {e.detail}")
        export_service.write_errors(out_dir, [{"stage": "config", **e.to_dict()}], create=False)
        return 2
    except LurkScopeError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        export_service.write_errors(out_dir, [{"stage": getattr(e, "stage", args.command), **e.to_dict()}])
        return 2
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        export_service.write_errors(out_dir, [{"stage": args.command, "code": "io_error", "detail": str(e)}])
        return 2


if __name__ == "__main__":
    sys.exit(main())
