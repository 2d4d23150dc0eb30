"""Core syntax-tree data types for MicroC.

The grammar covered by these nodes:

    Program      := TopDecl*
    TopDecl      := StructDecl | FuncForwardDecl | FuncDef | VarDecl
    StructDecl   := "struct" Ident "{" VarDecl* "}" ";"
    FuncForwardDecl := Type Ident "(" ParamList? ")" ";"
    FuncDef      := Type Ident "(" ParamList? ")" Block
    ParamList    := Param ("," Param)* ;  Param := Type Ident
    VarDecl      := Type Ident ("=" Expr)? ";"
    Stmt         := VarDecl | ExprStmt | ";" | Return | If | While | Goto
                    | LabeledStmt | Block
    Goto         := "goto" Ident ";" ;  LabeledStmt := Ident ":" Stmt
    Expr         := IntLit | Ident | Call | ("&"|"*") Expr | Expr BinOp Expr
                    | "(" Type ")" Expr | "(" Expr ")"
    BinOp        := "+" | "-" | "*" | "/" | "<" | "==" | "="

Trees are immutable; rewrites build new trees.  Every node carries a `uid`
that is preserved by rewrites for as long as the node survives, which is
what lets the dependency graph refer into the tree across edits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

# Node kinds.  A plain string enum keeps construction and matching light.
PROGRAM = "program"
STRUCT_DECL = "struct_decl"
FWD_DECL = "fwd_decl"
FUNC_DEF = "func_def"
PARAM_LIST = "param_list"
PARAM = "param"
VAR_DECL = "var_decl"
BLOCK = "block"
IF_STMT = "if_stmt"
WHILE_STMT = "while_stmt"
RETURN_STMT = "return_stmt"
GOTO_STMT = "goto_stmt"
LABELED_STMT = "labeled_stmt"
EXPR_STMT = "expr_stmt"
EMPTY_STMT = "empty_stmt"
ASSIGN = "assign"
BINOP = "binop"
UNARY = "unary"
CAST = "cast"
PAREN = "paren"
CALL = "call"
IDENT = "ident"
INT_LIT = "int_lit"
TYPE = "type"

STMT_KINDS = frozenset(
    {
        VAR_DECL,
        BLOCK,
        IF_STMT,
        WHILE_STMT,
        RETURN_STMT,
        GOTO_STMT,
        LABELED_STMT,
        EXPR_STMT,
        EMPTY_STMT,
    }
)

# The value printed by the `print` builtin is followed by a newline; the
# callee name is reserved and may not be declared by programs.
PRINT_BUILTIN = "print"


class FrontendError(Exception):
    """Base class for lex/parse failures; carries a source span."""

    def __init__(self, message: str, span: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.span = span


class LexError(FrontendError):
    pass


class ParseError(FrontendError):
    pass


@dataclass(frozen=True)
class Token:
    """One lexical token. `span` is a 0-based half-open offset range."""

    kind: str  # "keyword" | "identifier" | "integer-literal" | "punctuator" | "operator"
    lexeme: str
    span: tuple[int, int]


@dataclass(frozen=True)
class MicroCType:
    """A MicroC type: a base (`int`, `void`, or a struct name) plus pointer depth."""

    base: str
    depth: int = 0
    struct: bool = False

    def pointer(self, extra: int = 1) -> "MicroCType":
        return MicroCType(self.base, self.depth + extra, self.struct)

    def deref(self) -> "MicroCType":
        return MicroCType(self.base, max(0, self.depth - 1), self.struct)

    @property
    def is_void(self) -> bool:
        return self.base == "void" and self.depth == 0

    def __str__(self) -> str:
        head = f"struct {self.base}" if self.struct else self.base
        return head + "*" * self.depth


INT = MicroCType("int")
VOID = MicroCType("void")
# Substitute for deleted struct types and for function-as-value references;
# MicroC has no function types, so a deep void pointer stands in.
VOID3 = MicroCType("void", 3)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: tuple[int, int] | None = None

    def __str__(self) -> str:
        where = f"@{self.span[0]}..{self.span[1]}" if self.span else ""
        return f"{self.severity}{where}: {self.message}"


@dataclass(frozen=True)
class Node:
    """An immutable syntax node.

    `value` holds the node's payload: a name for ident/call/decl kinds, an
    int for literals, an operator string for binop/unary, or a MicroCType
    for type nodes.  `n_tokens` is the number of lexical tokens the subtree
    prints to, computed once at construction.
    """

    kind: str
    children: tuple["Node", ...] = ()
    value: object = None
    uid: int = -1
    span: tuple[int, int] | None = None
    n_tokens: int = field(default=0, compare=False)

    def __post_init__(self):
        count = 0
        for part in node_parts(self):
            count += part.n_tokens if isinstance(part, Node) else 1
        object.__setattr__(self, "n_tokens", count)

    def with_children(self, children: tuple["Node", ...]) -> "Node":
        return Node(self.kind, children, self.value, self.uid, self.span)

    def walk(self) -> Iterator["Node"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class SyntaxTree:
    """A parsed compilation unit: the root node plus the text it came from.

    `source` is None for trees produced by rewriting rather than parsing.
    `next_uid` is the watermark for allocating uids to synthesized nodes.
    """

    root: Node
    source: str | None = None
    next_uid: int = 0

    def nodes(self) -> Iterator[Node]:
        return self.root.walk()

    def find(self, uid: int) -> Node | None:
        for node in self.root.walk():
            if node.uid == uid:
                return node
        return None


def type_tokens(t: MicroCType) -> list[str]:
    toks = ["struct", t.base] if t.struct else [t.base]
    toks.extend("*" * t.depth)
    return toks


def node_parts(node: Node) -> Iterator[Union[str, Node]]:
    """Yield the node's print stream: fixed lexemes interleaved with children.

    This is the single source of truth for both the pretty-printer and
    token counting, so the two cannot drift apart.
    """
    k = node.kind
    c = node.children
    if k == PROGRAM:
        yield from c
    elif k == STRUCT_DECL:
        yield "struct"
        yield str(node.value)
        yield "{"
        yield from c
        yield "}"
        yield ";"
    elif k in (FWD_DECL, FUNC_DEF):
        yield c[0]  # return type
        yield str(node.value)
        yield "("
        yield c[1]  # param list
        yield ")"
        if k == FWD_DECL:
            yield ";"
        else:
            yield c[2]
    elif k == PARAM_LIST:
        for i, p in enumerate(c):
            if i:
                yield ","
            yield p
    elif k == PARAM:
        yield c[0]
        yield str(node.value)
    elif k == VAR_DECL:
        yield c[0]
        yield str(node.value)
        if len(c) > 1:
            yield "="
            yield c[1]
        yield ";"
    elif k == BLOCK:
        yield "{"
        yield from c
        yield "}"
    elif k == IF_STMT:
        yield "if"
        yield "("
        yield c[0]
        yield ")"
        yield c[1]
        if len(c) > 2:
            yield "else"
            yield c[2]
    elif k == WHILE_STMT:
        yield "while"
        yield "("
        yield c[0]
        yield ")"
        yield c[1]
    elif k == RETURN_STMT:
        yield "return"
        yield from c
        yield ";"
    elif k == GOTO_STMT:
        yield "goto"
        yield str(node.value)
        yield ";"
    elif k == LABELED_STMT:
        yield str(node.value)
        yield ":"
        yield c[0]
    elif k == EXPR_STMT:
        yield c[0]
        yield ";"
    elif k == EMPTY_STMT:
        yield ";"
    elif k == ASSIGN:
        yield c[0]
        yield "="
        yield c[1]
    elif k == BINOP:
        yield c[0]
        yield str(node.value)
        yield c[1]
    elif k == UNARY:
        yield str(node.value)
        yield c[0]
    elif k == CAST:
        yield "("
        yield c[0]
        yield ")"
        yield c[1]
    elif k == PAREN:
        yield "("
        yield c[0]
        yield ")"
    elif k == CALL:
        yield str(node.value)
        yield "("
        for i, a in enumerate(c):
            if i:
                yield ","
            yield a
        yield ")"
    elif k == IDENT:
        yield str(node.value)
    elif k == INT_LIT:
        yield str(node.value)
    elif k == TYPE:
        yield from type_tokens(node.value)  # type: ignore[arg-type]
    else:
        raise AssertionError(f"unknown node kind {k!r}")


def emit_tokens(node: Node) -> Iterator[str]:
    """Flatten a subtree into its lexeme stream."""
    for part in node_parts(node):
        if isinstance(part, Node):
            yield from emit_tokens(part)
        else:
            yield part


def structurally_equal(a: Node, b: Node) -> bool:
    """Equality ignoring uids and spans (the round-trip notion of identity)."""
    if a.kind != b.kind or a.value != b.value or len(a.children) != len(b.children):
        return False
    return all(structurally_equal(x, y) for x, y in zip(a.children, b.children))


def preorder_index(tree: SyntaxTree) -> dict[int, int]:
    """Map node uid to its preorder position; the stable source-order tiebreak."""
    return {node.uid: i for i, node in enumerate(tree.nodes())}


def parent_map(tree: SyntaxTree) -> dict[int, int]:
    """Map child uid -> parent uid."""
    parents: dict[int, int] = {}
    for node in tree.nodes():
        for child in node.children:
            parents[child.uid] = node.uid
    return parents
