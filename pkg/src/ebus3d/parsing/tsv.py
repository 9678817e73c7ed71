"""Parser for the tab-separated manifest and index tables.

A table is a ``#``-prefixed header line followed by one record per line.
Blank lines are skipped; column counts are checked by the caller's schema.
"""

from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from arpeggio import NoMatch, ParserPython, PTNodeVisitor, visit_parse_tree

from . import grammars
from .base import ParseError, ParseResult, TextParser, error_at, line_of


@dataclass(frozen=True)
class TableRow:
    cells: Tuple[str, ...]
    line: int

    def expect_columns(self, count: int) -> None:
        if len(self.cells) != count:
            raise ParseError(f"expected {count} tab-separated columns, got {len(self.cells)}", line=self.line)


@dataclass
class Table:
    header: str
    rows: List[TableRow] = field(default_factory=list)


class _TableVisitor(PTNodeVisitor):
    def __init__(self, text: str, **kwargs):
        super().__init__(**kwargs)
        self.text = text

    def visit_header(self, node, children):
        return node.value

    def visit_record(self, node, children):
        # empty cells produce no terminals, so split the matched span instead
        cells = tuple(self.text[node.position : node.position_end].split("\t"))
        if all(not c.strip() for c in cells):
            return None
        return TableRow(cells, line_of(self.text, node.position))

    def visit_table_document(self, node, children):
        return Table(children.results["header"][0], list(children.results.get("record", [])))


class TableParser(TextParser):
    """TSV parser using the PEG grammar."""

    def __init__(self, expected_header: Optional[str] = None):
        self.expected_header = expected_header
        self._parser = ParserPython(
            grammars.table_document,
            memoization=True,
            skipws=False,
        )

    def parse(self, text: str) -> ParseResult:
        try:
            tree = self._parser.parse(text)
            table: Table = visit_parse_tree(tree, _TableVisitor(text))
        except NoMatch as e:
            return ParseResult.error_result(error_at(text, "malformed table", e.position))
        if self.expected_header is not None and table.header.strip() != self.expected_header:
            return ParseResult.error_result(
                ParseError(f"expected header {self.expected_header!r}, got {table.header.strip()!r}", line=1)
            )
        return ParseResult.success_result(table)


def parse_table(text: str, expected_header: Optional[str] = None) -> Table:
    return TableParser(expected_header=expected_header).parse_or_raise(text)


def format_table(header: str, rows: Iterable[Sequence[object]]) -> str:
    lines = [header]
    for row in rows:
        cells = [str(c) for c in row]
        for cell in cells:
            if "\t" in cell or "\n" in cell:
                raise ValueError(f"table cell cannot contain tabs or newlines: {cell!r}")
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
