"""
Base parsing interfaces and types for ebus3d text formats.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Optional

from ..core.errors import Ebus3dError


class ParseError(Ebus3dError):
    """Exception raised when a config, manifest, index or sidecar file is malformed."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        position: Optional[int] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.message = message
        self.position = position
        self.line = line
        self.column = column
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.line is not None and self.column is not None:
            return f"{self.message} at line {self.line}, column {self.column}"
        elif self.line is not None:
            return f"{self.message} at line {self.line}"
        elif self.position is not None:
            return f"{self.message} at position {self.position}"
        return self.message


@dataclass
class ParseResult:
    """Result of a parsing operation."""

    success: bool
    value: Any = None
    error: Optional[ParseError] = None

    @classmethod
    def success_result(cls, value: Any) -> "ParseResult":
        """Create a successful parse result."""
        return cls(success=True, value=value)

    @classmethod
    def error_result(cls, error: ParseError) -> "ParseResult":
        """Create a failed parse result."""
        return cls(success=False, error=error)


class TextParser(ABC):
    """Abstract base class for the line-oriented text formats."""

    @abstractmethod
    def parse(self, text: str) -> ParseResult:
        """
        Parse a whole document.

        Args:
            text: The text to parse

        Returns:
            ParseResult containing the parsed value or error
        """

    def parse_or_raise(self, text: str) -> Any:
        """
        Parse text and raise exception on failure.

        Raises:
            ParseError: If parsing fails
        """
        result = self.parse(text)
        if not result.success:
            raise result.error
        return result.value

    def validate_syntax(self, text: str) -> bool:
        """Check whether text conforms to the grammar."""
        return self.parse(text).success


def line_of(text: str, position: int) -> int:
    """1-based line number of a character offset."""
    return text.count("\n", 0, position) + 1


def error_at(text: str, message: str, position: int) -> ParseError:
    """Build a ParseError carrying the line and column of ``position``."""
    column = position - text.rfind("\n", 0, position)
    return ParseError(message, position=position, line=line_of(text, position), column=column)
