"""Tests for the tab-separated table parser."""

import pytest

from ebus3d.parsing import ParseError, TableParser, format_table, parse_table


@pytest.mark.unit
class TestTableParser:
    """Header, records, blank lines and column checks."""

    def test_rows_and_lines(self):
        table = parse_table("#a\tb\tc\nx\ty\tz\n\n1\t\t3\n")
        assert table.header == "#a\tb\tc"
        assert [(row.cells, row.line) for row in table.rows] == [
            (("x", "y", "z"), 2),
            (("1", "", "3"), 4),
        ]

    def test_header_only(self):
        assert parse_table("#lesion\tlabel\n").rows == []

    def test_missing_header(self):
        with pytest.raises(ParseError):
            parse_table("x\ty\n")

    def test_expected_header(self):
        with pytest.raises(ParseError, match="expected header") as info:
            parse_table("#a\tb\n1\t2\n", expected_header="#a\tc")
        assert info.value.line == 1
        assert TableParser(expected_header="#a\tb").validate_syntax("#a\tb\n")

    def test_parser_instance_is_reusable(self):
        parser = TableParser(expected_header="#a\tb")
        first = parser.parse_or_raise("#a\tb\n1\t2\n")
        assert not parser.parse("#a\tc\n1\t2\n").success
        second = parser.parse_or_raise("#a\tb\n3\t4\n\n1\t2\n")
        assert [row.cells for row in first.rows] == [("1", "2")]
        assert [(row.cells, row.line) for row in second.rows] == [(("3", "4"), 2), (("1", "2"), 4)]

    def test_column_count(self):
        row = parse_table("#a\tb\n1\t2\t3\n").rows[0]
        with pytest.raises(ParseError, match="expected 2") as info:
            row.expect_columns(2)
        assert info.value.line == 2


@pytest.mark.unit
class TestFormatTable:
    """Writing tables."""

    def test_format_then_parse(self):
        text = format_table("#id\tvalue", [("a", 1), ("b", 2.5)])
        assert text == "#id\tvalue\na\t1\nb\t2.5\n"
        assert [row.cells for row in parse_table(text).rows] == [("a", "1"), ("b", "2.5")]

    def test_rejects_tabs_in_cells(self):
        with pytest.raises(ValueError):
            format_table("#x", [("a\tb",)])
