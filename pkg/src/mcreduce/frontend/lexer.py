"""Tokenizer for MicroC source text.

Comments (`// ...` and `/* ... */`) and whitespace are skipped and never
appear in the token list; everything the reducer reports as "tokens" comes
from here.  Spans are 0-based half-open offsets into the source text, so
`source[start:end] == lexeme` always holds.
"""

from __future__ import annotations

import re

from .ast import LexError, Token

KEYWORDS = frozenset({"int", "void", "struct", "if", "else", "while", "return", "goto"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<op>==|[=+\-*/<&])
  | (?P<punct>[(){};,:])
    """,
    re.VERBOSE | re.DOTALL,
)


def lex(source: str) -> list[Token]:
    """Tokenize `source`; raises LexError with a span on any stray byte."""
    tokens: list[Token] = []
    pos = 0
    n = len(source)
    while pos < n:
        # Without this check an unterminated /* would lex as '/' '*'.
        if source.startswith("/*", pos) and "*/" not in source[pos + 2:]:
            raise LexError("unterminated block comment", (pos, n))
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise LexError(f"unexpected character {source[pos]!r}", (pos, pos + 1))
        pos = m.end()
        group = m.lastgroup
        if group in ("ws", "line_comment", "block_comment"):
            continue
        lexeme = m.group()
        if group == "ident":
            kind = "keyword" if lexeme in KEYWORDS else "identifier"
        elif group == "int":
            kind = "integer-literal"
        elif group == "op":
            kind = "operator"
        else:
            kind = "punctuator"
        tokens.append(Token(kind, lexeme, (m.start(), m.end())))
    return tokens
