"""Parser for ``key = value`` documents: run configs and slice sidecar headers."""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

from arpeggio import NoMatch, ParserPython, PTNodeVisitor, visit_parse_tree

from . import grammars
from .base import ParseError, ParseResult, TextParser, error_at, line_of


@dataclass(frozen=True)
class KeyValueEntry:
    """One ``key = value`` line; ``line`` is 1-based."""

    key: str
    value: str
    line: int


class _EntryVisitor(PTNodeVisitor):
    def __init__(self, text: str, **kwargs):
        super().__init__(**kwargs)
        self.text = text

    def visit_key(self, node, children):
        return node.value

    def visit_value(self, node, children):
        return node.value.strip()

    def visit_entry(self, node, children):
        values = children.results.get("value", [""])
        return KeyValueEntry(children.results["key"][0], values[0], line_of(self.text, node.position))

    def visit_config_line(self, node, children):
        entries = children.results.get("entry")
        return entries[0] if entries else None

    def visit_config_document(self, node, children):
        return list(children.results.get("config_line", []))


class KeyValueParser(TextParser):
    """Key/value parser using the PEG grammar; duplicate keys are rejected."""

    def __init__(self) -> None:
        self._parser = ParserPython(
            grammars.config_document,
            memoization=True,
            skipws=False,
        )

    def parse(self, text: str) -> ParseResult:
        try:
            tree = self._parser.parse(text)
            entries: List[KeyValueEntry] = visit_parse_tree(tree, _EntryVisitor(text))
        except NoMatch as e:
            return ParseResult.error_result(error_at(text, "malformed key = value line", e.position))

        seen: Dict[str, int] = {}
        for entry in entries:
            if entry.key in seen:
                return ParseResult.error_result(
                    ParseError(f"duplicate key {entry.key!r} (first set on line {seen[entry.key]})", line=entry.line)
                )
            seen[entry.key] = entry.line
        return ParseResult.success_result(entries)


_default_parser: Optional[KeyValueParser] = None


def parse_key_values(text: str) -> List[KeyValueEntry]:
    """Parse a document, raising ParseError with the offending line."""
    global _default_parser
    if _default_parser is None:
        _default_parser = KeyValueParser()
    return _default_parser.parse_or_raise(text)


def read_key_values(path: Union[str, Path]) -> Dict[str, str]:
    return {entry.key: entry.value for entry in parse_key_values(Path(path).read_text(encoding="utf-8"))}


def format_key_values(items: Iterable[Tuple[str, object]]) -> str:
    lines = []
    for key, value in items:
        text = str(value)
        if "\n" in text or "#" in text:
            raise ValueError(f"value for {key!r} cannot contain a newline or '#': {text!r}")
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
