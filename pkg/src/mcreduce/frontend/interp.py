"""A small MicroC interpreter.

`print(e)` emits the integer value of `e` followed by a newline; that output
stream is what property-checker scripts inspect.  Execution is bounded by a
step budget so rewritten programs that loop forever (for example a guard
variable replaced by a nonzero default) terminate with a runtime error
instead of hanging the reducer.

Semantics notes, chosen for predictability on heavily rewritten programs:

  * variables without initializers start at 0 (structs at an opaque value);
  * division truncates toward zero; division by zero is a runtime error;
  * assignment to a non-lvalue evaluates the right side and discards it;
  * dereferencing an address that was never allocated is a runtime error;
  * `goto` may only target labels in the current or an enclosing statement
    list of the same function;
  * falling off the end of a function returns 0.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

from .ast import (
    ASSIGN,
    BINOP,
    BLOCK,
    CALL,
    CAST,
    EMPTY_STMT,
    EXPR_STMT,
    FUNC_DEF,
    GOTO_STMT,
    IDENT,
    IF_STMT,
    INT_LIT,
    LABELED_STMT,
    PAREN,
    PRINT_BUILTIN,
    RETURN_STMT,
    UNARY,
    VAR_DECL,
    WHILE_STMT,
    FrontendError,
    MicroCType,
    Node,
    SyntaxTree,
)
from .parser import parse_source
from .typecheck import typecheck

DEFAULT_FUEL = 1_000_000
# Each MicroC call costs several Python frames; stay well under Python's
# own recursion limit so the failure mode is ours, not a RecursionError.
MAX_CALL_DEPTH = 100


class MicroCRuntimeError(Exception):
    pass


class _Return(Exception):
    def __init__(self, value):
        self.value = value


class _Goto(Exception):
    def __init__(self, label: str):
        self.label = label


@dataclass(frozen=True)
class StructValue:
    """Opaque value of a struct-typed variable (MicroC has no member access)."""

    struct: str


@dataclass
class RunOutcome:
    ok: bool
    output: str
    error: Optional[str] = None
    phase: str = "ok"  # "ok" | "compile" | "runtime"


class _Interp:
    def __init__(self, tree: SyntaxTree, fuel: int):
        self.tree = tree
        self.fuel = fuel
        self.store: dict[int, object] = {}
        self.next_addr = 1
        self.globals: dict[str, int] = {}
        self.frames: list[list[dict[str, int]]] = []
        self.out: list[str] = []
        self.defs: dict[str, Node] = {}
        for decl in tree.root.children:
            if decl.kind == FUNC_DEF and str(decl.value) not in self.defs:
                self.defs[str(decl.value)] = decl

    # -- bookkeeping -----------------------------------------------------

    def burn(self) -> None:
        self.fuel -= 1
        if self.fuel <= 0:
            raise MicroCRuntimeError("step limit exceeded")

    def alloc(self, initial: object) -> int:
        addr = self.next_addr
        self.next_addr += 1
        self.store[addr] = initial
        return addr

    def default_for(self, t: MicroCType) -> object:
        if t.struct and t.depth == 0:
            return StructValue(t.base)
        return 0

    def lookup_addr(self, name: str) -> Optional[int]:
        if self.frames:
            for scope in reversed(self.frames[-1]):
                if name in scope:
                    return scope[name]
        return self.globals.get(name)

    def as_int(self, value: object, what: str) -> int:
        if not isinstance(value, int):
            raise MicroCRuntimeError(f"{what} requires an integer value")
        return value

    # -- driving ------------------------------------------------------------

    def run(self) -> str:
        for decl in self.tree.root.children:
            if decl.kind == VAR_DECL:
                t: MicroCType = decl.children[0].value  # type: ignore[assignment]
                value = self.eval(decl.children[1]) if len(decl.children) > 1 else self.default_for(t)
                self.globals[str(decl.value)] = self.alloc(value)
        entry = self.defs.get("main")
        if entry is None:
            raise MicroCRuntimeError("no 'main' function")
        if entry.children[1].children:
            raise MicroCRuntimeError("'main' must take no parameters")
        self.call_function(entry, [])
        return "".join(self.out)

    def call_function(self, func: Node, args: list[object]) -> object:
        if len(self.frames) >= MAX_CALL_DEPTH:
            raise MicroCRuntimeError("call depth limit exceeded")
        params = func.children[1].children
        scope = {str(p.value): self.alloc(a) for p, a in zip(params, args)}
        self.frames.append([scope])
        try:
            self.exec_stmts(func.children[2].children)
        except _Return as ret:
            return ret.value
        except _Goto as g:
            raise MicroCRuntimeError(f"goto target '{g.label}' not reachable") from None
        finally:
            self.frames.pop()
        return 0  # fell off the end

    # -- statements ------------------------------------------------------------

    def exec_stmts(self, stmts: tuple[Node, ...]) -> None:
        i = 0
        while i < len(stmts):
            try:
                self.exec_stmt(stmts[i])
            except _Goto as g:
                target = next(
                    (j for j, s in enumerate(stmts)
                     if s.kind == LABELED_STMT and str(s.value) == g.label),
                    None,
                )
                if target is None:
                    raise
                i = target
                continue
            i += 1

    def exec_stmt(self, stmt: Node) -> None:
        self.burn()
        k = stmt.kind
        if k == VAR_DECL:
            t: MicroCType = stmt.children[0].value  # type: ignore[assignment]
            value = self.eval(stmt.children[1]) if len(stmt.children) > 1 else self.default_for(t)
            self.frames[-1][-1][str(stmt.value)] = self.alloc(value)
        elif k == EXPR_STMT:
            self.eval(stmt.children[0])
        elif k == EMPTY_STMT:
            pass
        elif k == BLOCK:
            self.frames[-1].append({})
            try:
                self.exec_stmts(stmt.children)
            finally:
                self.frames[-1].pop()
        elif k == IF_STMT:
            if self.as_int(self.eval(stmt.children[0]), "condition") != 0:
                self.exec_stmt(stmt.children[1])
            elif len(stmt.children) > 2:
                self.exec_stmt(stmt.children[2])
        elif k == WHILE_STMT:
            while self.as_int(self.eval(stmt.children[0]), "condition") != 0:
                self.exec_stmt(stmt.children[1])
        elif k == RETURN_STMT:
            raise _Return(self.eval(stmt.children[0]) if stmt.children else 0)
        elif k == GOTO_STMT:
            raise _Goto(str(stmt.value))
        elif k == LABELED_STMT:
            self.exec_stmt(stmt.children[0])
        else:
            raise AssertionError(f"unexpected statement kind {k!r}")

    # -- expressions --------------------------------------------------------------

    def eval_lvalue(self, expr: Node) -> Optional[int]:
        if expr.kind == IDENT:
            return self.lookup_addr(str(expr.value))
        if expr.kind == UNARY and expr.value == "*":
            return self.as_int(self.eval(expr.children[0]), "dereference")
        if expr.kind == PAREN:
            return self.eval_lvalue(expr.children[0])
        return None

    def eval(self, expr: Node) -> object:
        self.burn()
        k = expr.kind
        if k == INT_LIT:
            return expr.value
        if k == IDENT:
            addr = self.lookup_addr(str(expr.value))
            if addr is None:
                return 0  # a function name used as a value: opaque
            return self.store[addr]
        if k == CALL:
            return self.eval_call(expr)
        if k == UNARY:
            if expr.value == "&":
                addr = self.eval_lvalue(expr.children[0])
                if addr is None:
                    raise MicroCRuntimeError("cannot take the address of this expression")
                return addr
            addr = self.as_int(self.eval(expr.children[0]), "dereference")
            if addr not in self.store:
                raise MicroCRuntimeError(f"invalid dereference of address {addr}")
            return self.store[addr]
        if k == BINOP:
            left = self.as_int(self.eval(expr.children[0]), "operand")
            right = self.as_int(self.eval(expr.children[1]), "operand")
            op = expr.value
            if op == "+":
                return left + right
            if op == "-":
                return left - right
            if op == "*":
                return left * right
            if op == "/":
                if right == 0:
                    raise MicroCRuntimeError("division by zero")
                return -(-left // right) if (left < 0) != (right < 0) else left // right
            if op == "<":
                return 1 if left < right else 0
            if op == "==":
                return 1 if left == right else 0
            raise AssertionError(f"unexpected operator {op!r}")
        if k == ASSIGN:
            addr = self.eval_lvalue(expr.children[0])
            value = self.eval(expr.children[1])
            if addr is not None:
                if addr not in self.store:
                    raise MicroCRuntimeError(f"invalid store to address {addr}")
                self.store[addr] = value
            return value
        if k == CAST:
            return self.eval(expr.children[1])
        if k == PAREN:
            return self.eval(expr.children[0])
        raise AssertionError(f"unexpected expression kind {k!r}")

    def eval_call(self, call: Node) -> object:
        name = str(call.value)
        args = [self.eval(a) for a in call.children]
        if name == PRINT_BUILTIN:
            value = self.as_int(args[0], "print")
            self.out.append(f"{value}\n")
            return value
        func = self.defs.get(name)
        if func is None:
            raise MicroCRuntimeError(f"call to undefined function '{name}'")
        if len(args) != len(func.children[1].children):
            raise MicroCRuntimeError(f"arity mismatch calling '{name}'")
        return self.call_function(func, args)


def run_tree(tree: SyntaxTree, fuel: int = DEFAULT_FUEL) -> str:
    """Execute a typechecked tree; returns the print output. May raise
    MicroCRuntimeError (with any partial output lost to the caller; use
    run_source when partial output matters)."""
    return _Interp(tree, fuel).run()


def run_source(source: str, fuel: int = DEFAULT_FUEL) -> RunOutcome:
    """Compile and execute source text; never raises for program faults."""
    try:
        tree = parse_source(source)
    except FrontendError as exc:
        return RunOutcome(False, "", str(exc), "compile")
    errors = [d for d in typecheck(tree) if d.severity == "error"]
    if errors:
        return RunOutcome(False, "", "; ".join(str(d) for d in errors), "compile")
    interp = _Interp(tree, fuel)
    try:
        output = interp.run()
    except MicroCRuntimeError as exc:
        return RunOutcome(False, "".join(interp.out), str(exc), "runtime")
    except RecursionError:
        return RunOutcome(False, "".join(interp.out), "recursion limit exceeded", "runtime")
    return RunOutcome(True, output, None, "ok")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="microc-run", description="Compile and run a MicroC program."
    )
    parser.add_argument("file", help="MicroC source file (.mc)")
    parser.add_argument("--fuel", type=int, default=DEFAULT_FUEL,
                        help="execution step budget (default: %(default)s)")
    args = parser.parse_args(argv)
    with open(args.file, encoding="utf-8") as handle:
        source = handle.read()
    outcome = run_source(source, args.fuel)
    sys.stdout.write(outcome.output)
    if outcome.phase == "compile":
        print(f"compile error: {outcome.error}", file=sys.stderr)
        return 2
    if outcome.phase == "runtime":
        print(f"runtime error: {outcome.error}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
