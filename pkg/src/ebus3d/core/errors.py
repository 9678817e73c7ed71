"""Error hierarchy shared by every ebus3d subpackage."""

from typing import Optional


class Ebus3dError(Exception):
    """Base class for all ebus3d errors."""

    exit_code = 2


class ShapeError(Ebus3dError, ValueError):
    """Tensor extents do not fit an operation."""


class GradientError(Ebus3dError, RuntimeError):
    """Autodiff misuse or a failed gradient check."""

    exit_code = 4


class NumericalError(Ebus3dError, ArithmeticError):
    """A non-finite value showed up in a forward or backward pass."""

    exit_code = 4

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        if step is not None:
            message = f"{message} (step {step})"
        super().__init__(message)


class CheckpointError(Ebus3dError):
    """Base class for checkpoint decoding failures."""

    exit_code = 3


class NotACheckpointError(CheckpointError):
    """Magic bytes are missing or wrong."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint was written by an unsupported format version."""


class CheckpointTruncatedError(CheckpointError):
    """Checkpoint ended before all declared content was read."""


class CheckpointMismatchError(CheckpointError):
    """Checkpoint content does not fit the model it is loaded into."""

    exit_code = 2


class ConfigError(Ebus3dError):
    """A configuration value is unknown or invalid."""

    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.message = message
        self.line = line
        self.key = key
        super().__init__(message)

    def __str__(self) -> str:
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.key is not None:
            where.append(f"key '{self.key}'")
        if where:
            return f"{self.message} ({', '.join(where)})"
        return self.message


class DataError(Ebus3dError, ValueError):
    """Input data violates a pipeline contract."""


class MissingFrameError(DataError, OSError):
    """A frame file referenced by a manifest does not exist."""

    exit_code = 3

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"missing frame file: {path}")

    def __str__(self) -> str:
        return f"missing frame file: {self.path}"


class MetricsError(Ebus3dError, ValueError):
    """Metric undefined for the given predictions."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception onto the CLI exit-code contract."""
    if isinstance(exc, Ebus3dError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 3
    return 1
