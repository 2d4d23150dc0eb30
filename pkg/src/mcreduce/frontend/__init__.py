"""MicroC front end: lexer, parser, printer, type checker, interpreter."""

from .ast import (
    Diagnostic,
    FrontendError,
    LexError,
    MicroCType,
    Node,
    ParseError,
    SyntaxTree,
    Token,
    structurally_equal,
)
from .interp import DEFAULT_FUEL, MicroCRuntimeError, RunOutcome, run_source, run_tree
from .lexer import lex
from .parser import parse, parse_source
from .printer import count_tokens, print_tree
from .typecheck import Analysis, analyze, typecheck

__all__ = [
    "Analysis",
    "DEFAULT_FUEL",
    "Diagnostic",
    "FrontendError",
    "LexError",
    "MicroCType",
    "MicroCRuntimeError",
    "Node",
    "ParseError",
    "RunOutcome",
    "SyntaxTree",
    "Token",
    "analyze",
    "count_tokens",
    "lex",
    "parse",
    "parse_source",
    "print_tree",
    "run_source",
    "run_tree",
    "structurally_equal",
    "typecheck",
]
