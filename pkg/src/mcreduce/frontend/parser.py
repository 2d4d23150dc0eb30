"""Recursive-descent parser producing `SyntaxTree` values.

Operator precedence, loosest to tightest:

    =  (right associative)
    ==
    <
    + -
    * /
    unary & * and casts (right associative)

A `(` begins a cast when the following token starts a type (`int`, `void`,
`struct`), otherwise a parenthesized expression.  Explicit parentheses are
kept as `paren` nodes so printing reproduces the original token sequence.
"""

from __future__ import annotations

from typing import Sequence

from .ast import (
    ASSIGN,
    BINOP,
    BLOCK,
    CALL,
    CAST,
    EMPTY_STMT,
    EXPR_STMT,
    FUNC_DEF,
    FWD_DECL,
    GOTO_STMT,
    IDENT,
    IF_STMT,
    INT_LIT,
    LABELED_STMT,
    PARAM,
    PARAM_LIST,
    PAREN,
    PROGRAM,
    RETURN_STMT,
    STRUCT_DECL,
    TYPE,
    UNARY,
    VAR_DECL,
    WHILE_STMT,
    MicroCType,
    Node,
    ParseError,
    SyntaxTree,
    Token,
)
from .lexer import lex

_TYPE_STARTERS = ("int", "void", "struct")


class _Parser:
    def __init__(self, tokens: Sequence[Token], source: str):
        self.tokens = list(tokens)
        self.source = source
        self.pos = 0
        self._next_uid = 0

    # -- token helpers -------------------------------------------------

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, *lexemes: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.lexeme in lexemes

    def _eof_span(self) -> tuple[int, int]:
        if self.tokens:
            end = self.tokens[-1].span[1]
            return (end, end)
        return (0, 0)

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        span = tok.span if tok else self._eof_span()
        found = repr(tok.lexeme) if tok else "end of input"
        return ParseError(f"{message}, found {found}", span)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.fail("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            raise self.fail(f"expected {lexeme!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != "identifier":
            raise self.fail("expected identifier")
        return self.advance()

    def node(self, kind: str, children=(), value=None, start: int = 0) -> Node:
        uid = self._next_uid
        self._next_uid += 1
        first = self.tokens[start].span[0]
        last = self.tokens[self.pos - 1].span[1]
        return Node(kind, tuple(children), value, uid, (first, last))

    # -- types ----------------------------------------------------------

    def at_type(self, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.lexeme in _TYPE_STARTERS

    def parse_type(self) -> Node:
        start = self.pos
        tok = self.advance()
        if tok.lexeme == "struct":
            name = self.expect_ident()
            base = MicroCType(name.lexeme, 0, struct=True)
        elif tok.lexeme in ("int", "void"):
            base = MicroCType(tok.lexeme, 0)
        else:
            self.pos -= 1
            raise self.fail("expected a type")
        depth = 0
        while self.at("*"):
            self.advance()
            depth += 1
        return self.node(TYPE, value=MicroCType(base.base, depth, base.struct), start=start)

    # -- declarations ----------------------------------------------------

    def parse_program(self) -> Node:
        start = self.pos
        decls = []
        while self.peek() is not None:
            decls.append(self.parse_top_decl())
        uid = self._next_uid
        self._next_uid += 1
        span = None
        if self.tokens:
            span = (self.tokens[0].span[0], self.tokens[-1].span[1])
        return Node(PROGRAM, tuple(decls), None, uid, span)

    def parse_top_decl(self) -> Node:
        nxt = self.peek(1)
        nxt2 = self.peek(2)
        if self.at("struct") and nxt is not None and nxt.kind == "identifier" \
                and nxt2 is not None and nxt2.lexeme == "{":
            return self.parse_struct_decl()
        if not self.at_type():
            raise self.fail("expected a declaration")
        start = self.pos
        ty = self.parse_type()
        name = self.expect_ident()
        if self.at("("):
            return self.parse_function(ty, name, start)
        return self.parse_var_decl_tail(ty, name, start)

    def parse_struct_decl(self) -> Node:
        start = self.pos
        self.expect("struct")
        name = self.expect_ident()
        self.expect("{")
        members = []
        while not self.at("}"):
            mstart = self.pos
            mty = self.parse_type()
            mname = self.expect_ident()
            members.append(self.parse_var_decl_tail(mty, mname, mstart))
        self.expect("}")
        self.expect(";")
        return self.node(STRUCT_DECL, members, name.lexeme, start)

    def parse_var_decl_tail(self, ty: Node, name: Token, start: int) -> Node:
        children = [ty]
        if self.at("="):
            self.advance()
            children.append(self.parse_expr())
        self.expect(";")
        return self.node(VAR_DECL, children, name.lexeme, start)

    def parse_function(self, ty: Node, name: Token, start: int) -> Node:
        self.expect("(")
        pstart = self.pos
        params = []
        if not self.at(")"):
            while True:
                prm_start = self.pos
                pty = self.parse_type()
                pname = self.expect_ident()
                params.append(self.node(PARAM, [pty], pname.lexeme, prm_start))
                if not self.at(","):
                    break
                self.advance()
        plist = self.node(PARAM_LIST, params, None, pstart if params else self.pos)
        self.expect(")")
        if self.at(";"):
            self.advance()
            return self.node(FWD_DECL, [ty, plist], name.lexeme, start)
        if self.at("{"):
            body = self.parse_block()
            return self.node(FUNC_DEF, [ty, plist, body], name.lexeme, start)
        raise self.fail("expected ';' or function body")

    # -- statements --------------------------------------------------------

    def parse_block(self) -> Node:
        start = self.pos
        self.expect("{")
        stmts = []
        while not self.at("}"):
            stmts.append(self.parse_stmt())
        self.expect("}")
        return self.node(BLOCK, stmts, None, start)

    def parse_stmt(self) -> Node:
        start = self.pos
        if self.at_type():
            ty = self.parse_type()
            name = self.expect_ident()
            return self.parse_var_decl_tail(ty, name, start)
        if self.at(";"):
            self.advance()
            return self.node(EMPTY_STMT, start=start)
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt()
            children = [cond, then]
            if self.at("else"):
                self.advance()
                children.append(self.parse_stmt())
            return self.node(IF_STMT, children, start=start)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_stmt()
            return self.node(WHILE_STMT, [cond, body], start=start)
        if self.at("return"):
            self.advance()
            children = []
            if not self.at(";"):
                children.append(self.parse_expr())
            self.expect(";")
            return self.node(RETURN_STMT, children, start=start)
        if self.at("goto"):
            self.advance()
            label = self.expect_ident()
            self.expect(";")
            return self.node(GOTO_STMT, value=label.lexeme, start=start)
        tok = self.peek()
        nxt = self.peek(1)
        if tok is not None and tok.kind == "identifier" and nxt is not None and nxt.lexeme == ":":
            self.advance()
            self.advance()
            inner = self.parse_stmt()
            return self.node(LABELED_STMT, [inner], tok.lexeme, start)
        expr = self.parse_expr()
        self.expect(";")
        return self.node(EXPR_STMT, [expr], start=start)

    # -- expressions --------------------------------------------------------

    def parse_expr(self) -> Node:
        return self.parse_assign()

    def parse_assign(self) -> Node:
        start = self.pos
        lhs = self.parse_equality()
        if self.at("="):
            self.advance()
            rhs = self.parse_assign()
            return self.node(ASSIGN, [lhs, rhs], start=start)
        return lhs

    def _binop_chain(self, ops: tuple[str, ...], sub) -> Node:
        start = self.pos
        left = sub()
        while self.at(*ops):
            op = self.advance().lexeme
            right = sub()
            left = self.node(BINOP, [left, right], op, start)
        return left

    def parse_equality(self) -> Node:
        return self._binop_chain(("==",), self.parse_relational)

    def parse_relational(self) -> Node:
        return self._binop_chain(("<",), self.parse_additive)

    def parse_additive(self) -> Node:
        return self._binop_chain(("+", "-"), self.parse_multiplicative)

    def parse_multiplicative(self) -> Node:
        return self._binop_chain(("*", "/"), self.parse_unary)

    def parse_unary(self) -> Node:
        start = self.pos
        if self.at("&", "*"):
            op = self.advance().lexeme
            operand = self.parse_unary()
            return self.node(UNARY, [operand], op, start)
        if self.at("(") and self.at_type(1):
            self.advance()
            ty = self.parse_type()
            self.expect(")")
            operand = self.parse_unary()
            return self.node(CAST, [ty, operand], start=start)
        return self.parse_primary()

    def parse_primary(self) -> Node:
        start = self.pos
        tok = self.peek()
        if tok is None:
            raise self.fail("expected an expression")
        if tok.kind == "integer-literal":
            self.advance()
            return self.node(INT_LIT, value=int(tok.lexeme), start=start)
        if tok.kind == "identifier":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.at(","):
                            break
                        self.advance()
                self.expect(")")
                return self.node(CALL, args, tok.lexeme, start)
            return self.node(IDENT, value=tok.lexeme, start=start)
        if tok.lexeme == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return self.node(PAREN, [inner], start=start)
        raise self.fail("expected an expression")


def parse(tokens: Sequence[Token], source: str = "") -> SyntaxTree:
    """Parse a token list into a SyntaxTree; all tokens must be consumed."""
    p = _Parser(tokens, source)
    root = p.parse_program()
    return SyntaxTree(root, source or None, p._next_uid)


def parse_source(source: str) -> SyntaxTree:
    tree = parse(lex(source), source)
    return SyntaxTree(tree.root, source, tree.next_uid)
