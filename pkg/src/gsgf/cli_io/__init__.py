"""Configuration, persistence and the command-line interface."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .persistence import (
    SnapshotError,
    read_records,
    read_snapshot,
    truncate_records,
    write_records,
    write_snapshot,
)

__all__ = [
    "ConfigError", "RunConfig", "load_config", "parse_config", "SnapshotError",
    "read_records", "read_snapshot", "truncate_records", "write_records", "write_snapshot",
]
