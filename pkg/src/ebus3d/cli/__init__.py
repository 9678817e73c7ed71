"""Command-line entry point and run configuration."""

from .config import ConfigSource, LoadedConfig, RunConfig, load_config, seed_overrides
from .app import build_parser, format_shape_table, main, run_command

__all__ = [
    "ConfigSource",
    "LoadedConfig",
    "RunConfig",
    "load_config",
    "seed_overrides",
    "build_parser",
    "format_shape_table",
    "main",
    "run_command",
]
