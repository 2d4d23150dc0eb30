"""Deterministic pretty-printer and token counting.

Formatting canon: tokens separated by a single space, a newline after `;`
and `}`, and no space around tight punctuation (`(`, and before `;` `,` `)`).
The exact layout is arbitrary but fixed; what matters is that output is
byte-deterministic and re-lexes to the same token sequence.
"""

from __future__ import annotations

from typing import Union

from .ast import Node, SyntaxTree, emit_tokens
from .lexer import lex

_NO_SPACE_BEFORE = frozenset({";", ",", ")", "("})
_NO_SPACE_AFTER = frozenset({"("})
_NEWLINE_AFTER = frozenset({";", "}"})


def layout(lexemes: list[str]) -> str:
    out: list[str] = []
    for i, lexeme in enumerate(lexemes):
        out.append(lexeme)
        if i + 1 < len(lexemes):
            nxt = lexemes[i + 1]
            if nxt in _NO_SPACE_BEFORE or lexeme in _NO_SPACE_AFTER:
                sep = ""
            elif lexeme in _NEWLINE_AFTER:
                sep = "\n"
            else:
                sep = " "
            out.append(sep)
    if lexemes and lexemes[-1] in _NEWLINE_AFTER:
        out.append("\n")
    return "".join(out)


def print_tree(tree: Union[SyntaxTree, Node]) -> str:
    root = tree.root if isinstance(tree, SyntaxTree) else tree
    return layout(list(emit_tokens(root)))


def count_tokens(value: Union[SyntaxTree, Node, str]) -> int:
    """Token count of a tree or of source text (comments/whitespace excluded)."""
    if isinstance(value, str):
        return len(lex(value))
    root = value.root if isinstance(value, SyntaxTree) else value
    return root.n_tokens
