"""
PEG grammars (Arpeggio) for the key = value and tab-separated formats.

Both are parsed with ``skipws=False``: whitespace is significant in TSV
cells and is trimmed explicitly around keys and values.
"""

from arpeggio import EOF, ZeroOrMore
from arpeggio import Optional as ArpeggioOptional
from arpeggio import RegExMatch as _


# Shared tokens


def newline():
    return _(r"\r?\n")


def blank():
    return _(r"[ \t]*")


# key = value documents (run configs and slice sidecars)


def comment():
    return _(r"#[^\r\n]*")


def key():
    return _(r"[A-Za-z_][A-Za-z0-9_.\-]*")


def value():
    return _(r"[^#\r\n]*")


def entry():
    return key, blank, "=", blank, value


def config_line():
    return blank, ArpeggioOptional(entry), blank, ArpeggioOptional(comment)


def config_document():
    return config_line, ZeroOrMore(newline, config_line), EOF


# Tab-separated tables (manifest and index)


def header():
    return _(r"#[^\r\n]*")


def cell():
    return _(r"[^\t\r\n]*")


def record():
    return cell, ZeroOrMore("\t", cell)


def table_document():
    return header, ZeroOrMore(newline, record), EOF
