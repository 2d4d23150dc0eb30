"""Name resolution and type checking.

A program is "compilable" when this pass reports zero errors.  The rules:

  * every identifier resolves in scope (declaration-point visibility,
    inner scopes shadow outer ones);
  * every call's argument count equals the callee's parameter count, and
    the callee must actually be a function (or the `print` builtin);
  * every goto's label exists somewhere in the enclosing function;
  * assignments and initializers unify on base type and pointer depth;
    casts unify anything;
  * a forward declaration's signature matches its definition;
  * `void` with pointer depth 0 is legal only as a return type, and a
    struct type must name a previously declared struct.

Everything else is deliberately lax: binary operators accept any operand
types and yield int, dereferencing a non-pointer is tolerated, and lvalues
are not enforced.  The laxity is what keeps default-value rewrites of
deleted declarations compilable in every surviving context.

`analyze` additionally returns the bindings (use sites, call sites, type
references, goto targets) that the dependency graph is built from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    ASSIGN,
    BINOP,
    BLOCK,
    CALL,
    CAST,
    EXPR_STMT,
    FUNC_DEF,
    FWD_DECL,
    GOTO_STMT,
    IDENT,
    IF_STMT,
    INT,
    INT_LIT,
    LABELED_STMT,
    PAREN,
    PRINT_BUILTIN,
    RETURN_STMT,
    STRUCT_DECL,
    UNARY,
    VAR_DECL,
    VOID3,
    WHILE_STMT,
    Diagnostic,
    MicroCType,
    Node,
    SyntaxTree,
)


@dataclass
class FuncSig:
    name: str
    ret: MicroCType
    param_names: list[str]
    param_types: list[MicroCType]
    def_uid: Optional[int] = None
    fwd_uid: Optional[int] = None
    def_param_uids: list[int] = field(default_factory=list)
    fwd_param_uids: list[int] = field(default_factory=list)

    @property
    def provider_uid(self) -> int:
        uid = self.def_uid if self.def_uid is not None else self.fwd_uid
        assert uid is not None
        return uid


@dataclass
class Analysis:
    diagnostics: list[Diagnostic] = field(default_factory=list)
    var_uses: dict[int, int] = field(default_factory=dict)  # ident uid -> decl uid
    func_value_uses: dict[int, str] = field(default_factory=dict)  # ident uid -> func name
    call_bindings: dict[int, str] = field(default_factory=dict)  # call uid -> func name
    type_bindings: dict[int, int] = field(default_factory=dict)  # type uid -> struct uid
    goto_bindings: dict[int, int] = field(default_factory=dict)  # goto uid -> label uid
    functions: dict[str, FuncSig] = field(default_factory=dict)
    structs: dict[str, int] = field(default_factory=dict)
    decl_types: dict[int, MicroCType] = field(default_factory=dict)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]

    def error(self, message: str, node: Node) -> None:
        self.diagnostics.append(Diagnostic("error", message, node.span))


@dataclass
class _Binding:
    kind: str  # "var" | "param" | "func"
    uid: int
    type: Optional[MicroCType] = None
    func: Optional[FuncSig] = None


class _Checker:
    def __init__(self, tree: SyntaxTree):
        self.tree = tree
        self.out = Analysis()
        # Ordinary namespace (variables, parameters, functions); struct tags
        # live separately.  Scope 0 is the global scope, filled as top-level
        # declarations are walked, which gives declaration-point visibility.
        self.scopes: list[dict[str, _Binding]] = [{}]
        self.labels: dict[str, int] = {}

    # -- scope helpers ----------------------------------------------------

    def lookup(self, name: str) -> Optional[_Binding]:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name: str, binding: _Binding, node: Node) -> None:
        if name == PRINT_BUILTIN:
            self.out.error(f"'{PRINT_BUILTIN}' is a reserved builtin name", node)
        self.scopes[-1][name] = binding

    # -- types --------------------------------------------------------------

    def resolve_type(self, type_node: Node) -> MicroCType:
        t: MicroCType = type_node.value  # type: ignore[assignment]
        if t.struct:
            struct_uid = self.out.structs.get(t.base)
            if struct_uid is None:
                self.out.error(f"unresolved struct '{t.base}'", type_node)
            else:
                self.out.type_bindings[type_node.uid] = struct_uid
        return t

    def check_object_type(self, type_node: Node, what: str) -> MicroCType:
        t = self.resolve_type(type_node)
        if t.is_void:
            self.out.error(f"{what} may not have bare void type", type_node)
        return t

    def unify(self, target: Optional[MicroCType], value: Optional[MicroCType], node: Node) -> None:
        if target is None or value is None:
            return  # a prior error already fired; avoid cascades
        if target != value:
            self.out.error(f"type mismatch: cannot assign {value} to {target}", node)

    # -- program ----------------------------------------------------------

    def run(self) -> Analysis:
        for decl in self.tree.root.children:
            if decl.kind == STRUCT_DECL:
                self.check_struct(decl)
            elif decl.kind == VAR_DECL:
                self.check_var_decl(decl)
            elif decl.kind in (FWD_DECL, FUNC_DEF):
                self.check_function(decl)
        # A compilation unit is all there is: a forward declaration cannot
        # match a definition that does not exist.
        for sig in self.out.functions.values():
            if sig.fwd_uid is not None and sig.def_uid is None:
                self.out.diagnostics.append(
                    Diagnostic(
                        "error",
                        f"forward declaration of '{sig.name}' has no definition",
                        self.tree.find(sig.fwd_uid).span,
                    )
                )
        return self.out

    def check_struct(self, decl: Node) -> None:
        for member in decl.children:
            self.check_object_type(member.children[0], "struct member")
            if len(member.children) > 1:
                value = self.type_of(member.children[1])
                self.unify(member.children[0].value, value, member)
        self.out.structs[str(decl.value)] = decl.uid

    def check_var_decl(self, decl: Node) -> None:
        t = self.check_object_type(decl.children[0], "variable")
        self.out.decl_types[decl.uid] = t
        self.declare(str(decl.value), _Binding("var", decl.uid, t), decl)
        if len(decl.children) > 1:
            value = self.type_of(decl.children[1])
            self.unify(t, value, decl)

    def check_function(self, decl: Node) -> None:
        name = str(decl.value)
        ret = self.resolve_type(decl.children[0])
        param_nodes = decl.children[1].children
        param_types = [self.check_object_type(p.children[0], "parameter") for p in param_nodes]
        param_names = [str(p.value) for p in param_nodes]
        param_uids = [p.uid for p in param_nodes]
        for p, t in zip(param_nodes, param_types):
            self.out.decl_types[p.uid] = t

        sig = self.out.functions.get(name)
        if sig is None:
            sig = FuncSig(name, ret, param_names, param_types)
            self.out.functions[name] = sig
            self.declare(name, _Binding("func", decl.uid, func=sig), decl)
        else:
            if ret != sig.ret or param_types != sig.param_types:
                self.out.error(
                    f"declaration of '{name}' does not match its earlier signature", decl
                )
            if decl.kind == FUNC_DEF and sig.def_uid is None:
                # The definition's parameter names are authoritative.
                sig.param_names = param_names
                sig.param_types = param_types
        if decl.kind == FUNC_DEF:
            if sig.def_uid is None:
                sig.def_uid = decl.uid
                sig.def_param_uids = param_uids
        elif sig.fwd_uid is None:
            sig.fwd_uid = decl.uid
            sig.fwd_param_uids = param_uids

        if decl.kind == FUNC_DEF and sig.def_uid == decl.uid:
            self.labels = self.collect_labels(decl)
            self.scopes.append(
                {n: _Binding("param", u, t) for n, u, t in zip(param_names, param_uids, param_types)}
            )
            for pname, pnode in zip(param_names, param_nodes):
                if pname == PRINT_BUILTIN:
                    self.out.error(f"'{PRINT_BUILTIN}' is a reserved builtin name", pnode)
            self.check_block(decl.children[2])
            self.scopes.pop()
            self.labels = {}

    def collect_labels(self, func: Node) -> dict[str, int]:
        labels: dict[str, int] = {}
        for node in func.walk():
            if node.kind == LABELED_STMT and str(node.value) not in labels:
                labels[str(node.value)] = node.uid
        return labels

    # -- statements -----------------------------------------------------------

    def check_block(self, block: Node) -> None:
        self.scopes.append({})
        for stmt in block.children:
            self.check_stmt(stmt)
        self.scopes.pop()

    def check_stmt(self, stmt: Node) -> None:
        k = stmt.kind
        if k == VAR_DECL:
            self.check_var_decl(stmt)
        elif k == BLOCK:
            self.check_block(stmt)
        elif k == EXPR_STMT:
            self.type_of(stmt.children[0])
        elif k == IF_STMT:
            self.type_of(stmt.children[0])
            for body in stmt.children[1:]:
                self.check_stmt(body)
        elif k == WHILE_STMT:
            self.type_of(stmt.children[0])
            self.check_stmt(stmt.children[1])
        elif k == RETURN_STMT:
            if stmt.children:
                self.type_of(stmt.children[0])
        elif k == GOTO_STMT:
            label = str(stmt.value)
            if label in self.labels:
                self.out.goto_bindings[stmt.uid] = self.labels[label]
            else:
                self.out.error(f"goto target '{label}' is not a label in this function", stmt)
        elif k == LABELED_STMT:
            self.check_stmt(stmt.children[0])
        # empty_stmt: nothing to do

    # -- expressions ------------------------------------------------------------

    def type_of(self, expr: Node) -> Optional[MicroCType]:
        k = expr.kind
        if k == INT_LIT:
            return INT
        if k == IDENT:
            name = str(expr.value)
            binding = self.lookup(name)
            if binding is None:
                self.out.error(f"unresolved identifier '{name}'", expr)
                return None
            if binding.kind == "func":
                self.out.func_value_uses[expr.uid] = name
                return VOID3  # function used as a value: an opaque pointer
            self.out.var_uses[expr.uid] = binding.uid
            return binding.type
        if k == CALL:
            return self.type_of_call(expr)
        if k == UNARY:
            t = self.type_of(expr.children[0])
            if t is None:
                return None
            if expr.value == "&":
                return t.pointer()
            return t.deref() if t.depth > 0 else t  # lax deref of non-pointers
        if k == BINOP:
            self.type_of(expr.children[0])
            self.type_of(expr.children[1])
            return INT
        if k == ASSIGN:
            target = self.type_of(expr.children[0])
            value = self.type_of(expr.children[1])
            self.unify(target, value, expr)
            return target
        if k == CAST:
            t = self.resolve_type(expr.children[0])
            self.type_of(expr.children[1])
            return t
        if k == PAREN:
            return self.type_of(expr.children[0])
        raise AssertionError(f"unexpected expression kind {k!r}")

    def type_of_call(self, call: Node) -> Optional[MicroCType]:
        name = str(call.value)
        for arg in call.children:
            self.type_of(arg)
        if name == PRINT_BUILTIN:
            if len(call.children) != 1:
                self.out.error(
                    f"arity mismatch: print expects 1 argument, got {len(call.children)}", call
                )
            return INT
        binding = self.lookup(name)
        if binding is None:
            self.out.error(f"unresolved identifier '{name}'", call)
            return None
        if binding.kind != "func" or binding.func is None:
            self.out.error(f"'{name}' is not a function", call)
            return None
        sig = binding.func
        if len(call.children) != len(sig.param_types):
            self.out.error(
                f"arity mismatch: '{name}' expects {len(sig.param_types)} "
                f"argument(s), got {len(call.children)}",
                call,
            )
        self.out.call_bindings[call.uid] = name
        return sig.ret


def analyze(tree: SyntaxTree) -> Analysis:
    """Resolve names and types; returns diagnostics plus binding tables."""
    return _Checker(tree).run()


def typecheck(tree: SyntaxTree) -> list[Diagnostic]:
    """The compilability check: an empty error list means the tree compiles."""
    return analyze(tree).diagnostics
