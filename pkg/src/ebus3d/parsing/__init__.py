"""Text-format parsers: key = value documents and tab-separated tables."""

from .base import ParseError, ParseResult, TextParser
from .keyvalue import KeyValueEntry, KeyValueParser, format_key_values, parse_key_values, read_key_values
from .tsv import Table, TableParser, TableRow, format_table, parse_table

__all__ = [
    "ParseError",
    "ParseResult",
    "TextParser",
    "KeyValueEntry",
    "KeyValueParser",
    "format_key_values",
    "parse_key_values",
    "read_key_values",
    "Table",
    "TableParser",
    "TableRow",
    "format_table",
    "parse_table",
]
