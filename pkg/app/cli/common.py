"""Options shared by every subcommand and the config they resolve to."""

import argparse
import logging
from typing import Any

from pydantic import ValidationError

from app.core.config import Settings, get_settings
from app.core.exceptions import ConfigError
from app.models.snapshot import EdgePolicy, SnapshotMode
from app.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)


def _default(field: str) -> Any:
    return Settings.model_fields[field].default


def common_parser() -> argparse.ArgumentParser:
    """Parent parser; flags default to None so settings and env values apply unless overridden."""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("run options")
    group.add_argument("--config", help="KEY=value config file (default: .env if present)")
    group.add_argument("--input", dest="input_path", help="event CSV")
    group.add_argument("--out", dest="output_dir", help=f"run directory (default: {_default('OUTPUT_DIR')})")
    group.add_argument(
        "--mode", dest="snapshot_mode", choices=[m.value for m in SnapshotMode],
        help=f"snapshot mode (default: {_default('SNAPSHOT_MODE')})"
    )
    group.add_argument(
        "--edge-policy", choices=[p.value for p in EdgePolicy],
        help=f"events inducing edges (default: {_default('EDGE_POLICY')})"
    )
    group.add_argument(
        "--interval-days", type=int,
        help=f"snapshot length in days (default: {_default('INTERVAL_DAYS')})"
    )
    group.add_argument("--damping", type=float, help=f"damping factor d (default: {_default('DAMPING')})")
    group.add_argument("--omega-f", type=float, help=f"freshness weight (default: {_default('OMEGA_F')})")
    group.add_argument("--omega-a", type=float, help=f"activity weight (default: {_default('OMEGA_A')})")
    group.add_argument(
        "--top-frac", type=float,
        help=f"top-k fraction of the Fagin intersection (default: {_default('TOP_FRAC')})"
    )
    group.add_argument("--jobs", type=int, help=f"per-snapshot concurrency (default: {_default('JOBS')})")
    group.add_argument("--seed", type=int, help=f"random seed (default: {_default('SEED')})")
    group.add_argument("--debug", action="store_true", help="debug logging")
    return parser


OVERRIDE_KEYS = (
    "input_path", "output_dir", "snapshot_mode", "edge_policy", "interval_days",
    "damping", "omega_f", "omega_a", "top_frac", "jobs", "seed",
)


def build_config(args: argparse.Namespace, **extra: Any) -> RunConfig:
    """Resolve flag > environment > config file > default."""
    try:
        current = get_settings(args.config) if getattr(args, "config", None) else get_settings()
    except ValidationError as e:
        fields = sorted({str(err["loc"][0]) for err in e.errors() if err["loc"]})
        raise ConfigError(fields, f"Invalid settings: {', '.join(fields)}")
    overrides = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
    overrides.update(extra)
    config = RunConfig.from_settings(current, **overrides)
    logger.debug(f"Resolved config {config.config_hash()[:12]}")
    return config
