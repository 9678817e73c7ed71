"""Pydantic base for config sections read from ``key = value`` files."""

from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, BeforeValidator, ConfigDict, ValidationError
from typing_extensions import Annotated

from .errors import ConfigError

M = TypeVar("M", bound="ConfigModel")


def _split_words(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(value.replace(",", " ").split())
    return value


IntPair = Annotated[Tuple[int, int], BeforeValidator(_split_words)]


class ConfigModel(BaseModel):
    """Strict, immutable config section; unknown keys are errors."""

    model_config = ConfigDict(extra="forbid", frozen=True, validate_default=True)

    def items(self) -> Dict[str, Any]:
        return {name: getattr(self, name) for name in type(self).model_fields}


def build_config(
    cls: Type[M],
    values: Mapping[str, Any],
    lines: Optional[Mapping[str, int]] = None,
    prefix: str = "",
) -> M:
    """Validate ``values`` into ``cls``; the first failure becomes a ConfigError naming line and key."""
    lines = lines or {}
    try:
        return cls(**values)
    except ValidationError as exc:
        error = exc.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else None
        key = f"{prefix}{field}" if field else None
        line = lines.get(field) if field else None
        raise ConfigError(f"invalid configuration: {error['msg']}", line=line, key=key) from None
