"""mcreduce: a three-stage test-case reducer for MicroC programs.

Stage 1 builds a semantic dependency graph over the parse tree, stage 2
deletes semantic nodes under a ddmin search while reconstructing the
dependencies each deletion breaks (so every intermediate still compiles),
and stage 3 runs a grammar-aware fixpoint pass that deletes whatever
subtrees the property oracle will still accept.
"""

from .frontend import (
    Diagnostic,
    LexError,
    MicroCType,
    Node,
    ParseError,
    RunOutcome,
    SyntaxTree,
    Token,
    count_tokens,
    lex,
    parse,
    parse_source,
    print_tree,
    run_source,
    run_tree,
    typecheck,
)

__version__ = "0.1.0"

__all__ = [
    "Diagnostic",
    "LexError",
    "MicroCType",
    "Node",
    "ParseError",
    "RunOutcome",
    "SyntaxTree",
    "Token",
    "count_tokens",
    "lex",
    "parse",
    "parse_source",
    "print_tree",
    "run_source",
    "run_tree",
    "typecheck",
    "__version__",
]
