"""Core utilities shared across ebus3d."""

from .types import BinaryRecord, GraphicSignal, Label, Mode, Split, Variant
from .errors import (
    CheckpointError,
    CheckpointMismatchError,
    CheckpointTruncatedError,
    CheckpointVersionError,
    ConfigError,
    DataError,
    Ebus3dError,
    GradientError,
    MetricsError,
    MissingFrameError,
    NotACheckpointError,
    NumericalError,
    ShapeError,
    exit_code_for,
)
from .workers import map_concurrently, worker_limit
from .logs import configure_logging, echo_config
from .config import ConfigModel, IntPair, build_config

__all__ = [
    "BinaryRecord",
    "GraphicSignal",
    "Label",
    "Mode",
    "Split",
    "Variant",
    "CheckpointError",
    "CheckpointMismatchError",
    "CheckpointTruncatedError",
    "CheckpointVersionError",
    "ConfigError",
    "DataError",
    "Ebus3dError",
    "GradientError",
    "MetricsError",
    "MissingFrameError",
    "NotACheckpointError",
    "NumericalError",
    "ShapeError",
    "exit_code_for",
    "map_concurrently",
    "worker_limit",
    "configure_logging",
    "echo_config",
    "ConfigModel",
    "IntPair",
    "build_config",
]
