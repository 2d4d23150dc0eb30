"""Dependency reconstruction: delete nodes, repair their surviving users.

Repair rules, by (provider, reference) pair:

  * struct / type reference        -> base becomes void with 3 extra stars,
                                      original pointer depth preserved
  * function / call                -> the call becomes the default value of
                                      the return type: 1 for int, (T)0 for
                                      pointers; a void call that is a whole
                                      statement becomes the empty statement
  * function / plain identifier    -> (void***)0 (MicroC has no function
                                      types, so a deep pointer stands in)
  * variable or parameter / ident  -> default value of the declared type
  * goto label / goto statement    -> the goto statement is deleted

Deleting any member of an associated group deletes the whole group: a
parameter takes the argument at that position of every call site (and the
matching parameter of the paired forward declaration), a definition takes
its forward declaration and vice versa.  Nodes lexically inside deleted or
replaced subtrees are cascaded: their edges drop without placeholders.

`apply` returns a tree that must typecheck cleanly; a failure is an
internal bug signal (ApplyError) and the candidate is never submitted to
the oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .frontend.ast import (
    BLOCK,
    CALL,
    CAST,
    EMPTY_STMT,
    EXPR_STMT,
    INT_LIT,
    PARAM_LIST,
    PROGRAM,
    STRUCT_DECL,
    TYPE,
    VOID3,
    MicroCType,
    Node,
    SyntaxTree,
    parent_map,
)
from .frontend.typecheck import analyze
from .semgraph import (
    N_ARG,
    N_FUNC,
    N_FWD,
    N_GLOBAL,
    N_LABEL,
    N_LOCAL,
    N_PARAM,
    N_STMT,
    N_STRUCT,
    DependencyGraph,
    GraphNode,
    RefSite,
)


class DefaultError(Exception):
    pass


class PlanError(Exception):
    pass


class ApplyError(Exception):
    pass


def _template(kind: str, children=(), value=None) -> Node:
    return Node(kind, tuple(children), value, uid=-1, span=None)


def default_value_for(t: MicroCType) -> Node:
    """The default-value expression for a type: 1 for int, a cast of 0 for
    pointers.  Bare void and plain struct values have no default."""
    if t.is_void:
        raise DefaultError("void has no default value")
    if t.depth == 0:
        if t.struct:
            raise DefaultError(f"struct {t.base} has no default value")
        return _template(INT_LIT, value=1)
    return _template(CAST, [_template(TYPE, value=t), _template(INT_LIT, value=0)])


@dataclass(frozen=True)
class Rewrite:
    site_uid: int
    kind: str  # "expr" | "type" | "empty-stmt"
    template: Node
    edge: tuple[int, int]


@dataclass(frozen=True)
class ReconstructionPlan:
    requested: frozenset[int]
    deletions: frozenset[int]  # graph node ids, closed under groups and cascades
    delete_uids: frozenset[int]  # subtrees spliced out of list positions
    rewrites: tuple[Rewrite, ...]
    param_filters: dict[int, frozenset[int]]  # param_list uid -> positions dropped
    arg_filters: dict[int, frozenset[int]]  # call uid -> positions dropped
    placeholders: dict[tuple[int, int], int]  # surviving edge -> replacement uid

    def to_json_line(self) -> str:
        """One-line JSON form for the debug log."""
        return json.dumps(
            {
                "requested": sorted(self.requested),
                "deletions": sorted(self.deletions),
                "delete_uids": sorted(self.delete_uids),
                "rewrites": [
                    {"site": r.site_uid, "kind": r.kind, "edge": list(r.edge)}
                    for r in self.rewrites
                ],
                "param_filters": {str(k): sorted(v) for k, v in self.param_filters.items()},
                "arg_filters": {str(k): sorted(v) for k, v in self.arg_filters.items()},
            },
            sort_keys=True,
        )


def _uid_ancestors(uid: int, parents: dict[int, int]):
    cursor = parents.get(uid)
    while cursor is not None:
        yield cursor
        cursor = parents.get(cursor)


def plan(graph: DependencyGraph, requested) -> ReconstructionPlan:
    """Close `requested` under groups and cascades and assign repairs."""
    requested = frozenset(requested)
    unknown = requested - graph.nodes.keys()
    if unknown:
        raise PlanError(f"unknown node ids {sorted(unknown)}")
    for node_id in requested:
        if graph.nodes[node_id].kind in (N_ARG,):
            raise PlanError("arguments are deleted via their parameter's group")

    tree = graph.tree
    parents = parent_map(tree)
    uid_nodes = {n.uid: n for n in tree.nodes()}
    by_uid = {n.uid: n for n in graph.nodes.values()}

    core: set[int] = set(requested)
    rewrites: dict[int, Rewrite] = {}

    # Structs only ever enter the deletion set by request (they are
    # top-level and belong to no group), so the set of dying struct names
    # is known up front.  Default values whose type mentions one must fall
    # back to the deep-void substitute or the repair itself would dangle.
    dead_structs = {
        str(uid_nodes[graph.nodes[i].uid].value)
        for i in requested
        if graph.nodes[i].kind == N_STRUCT
    }

    def repair_type(t: MicroCType) -> MicroCType:
        if t.struct and t.base in dead_structs:
            return MicroCType("void", 3 + t.depth)
        return t

    def closure() -> None:
        changed = True
        while changed:
            changed = False
            # Group closure: deleting a parameter, forward declaration or
            # definition takes the whole group.  Arguments dying collaterally
            # (their statement or call went away) do not drag the group down.
            for group in graph.groups:
                triggers = {
                    m
                    for m in group.members & core
                    if graph.nodes[m].kind in (N_PARAM, N_FWD, N_FUNC)
                }
                if triggers and not group.members <= core:
                    core.update(group.members)
                    changed = True
            # Subtree cascade: anything enrolled inside a deleted subtree or
            # inside a replaced reference site is implicitly deleted.  A
            # node at a deleted uid itself counts too (a placeholder reusing
            # a spliced site's uid shares its text), but a node at a rewrite
            # site survives: it becomes the rewritten text.
            core_uids = {graph.nodes[i].uid for i in core}
            site_uids = {r.site_uid for r in rewrites.values()}
            gone = core_uids | site_uids
            for node in graph.nodes.values():
                if node.id in core:
                    continue
                if node.uid in core_uids or any(
                    a in gone for a in _uid_ancestors(node.uid, parents)
                ):
                    core.add(node.id)
                    changed = True

    def add_rewrite(site_uid: int, kind: str, template: Node, edge) -> None:
        rewrites[site_uid] = Rewrite(site_uid, kind, template, edge)

    def plan_call_rewrite(site: RefSite, provider: GraphNode, edge) -> None:
        ret: MicroCType = repair_type(uid_nodes[provider.uid].children[0].value)  # type: ignore[arg-type]
        if ret.is_void:
            stmt_uid = parents.get(site.uid)
            stmt = uid_nodes.get(stmt_uid) if stmt_uid is not None else None
            if stmt is not None and stmt.kind == EXPR_STMT:
                add_rewrite(stmt.uid, "empty-stmt", _template(EMPTY_STMT), edge)
            else:
                # A void call buried in an expression can only have gotten
                # there through a cast or a lax operand; 1 fits both.
                add_rewrite(site.uid, "expr", _template(INT_LIT, value=1), edge)
            return
        add_rewrite(site.uid, "expr", default_value_for(ret), edge)

    # Fixpoint: rewrites can enlarge the deletion set (goto users) and the
    # deletion set determines which edges still need rewrites.
    while True:
        closure()
        before = len(core), len(rewrites)
        for (u, p), sites in graph.edges.items():
            if p not in core or u in core:
                continue
            provider = graph.nodes[p]
            for site in sites:
                if site.uid in rewrites:
                    continue
                if site.kind == "type" and provider.kind == N_STRUCT:
                    original: MicroCType = uid_nodes[site.uid].value  # type: ignore[assignment]
                    repaired = MicroCType("void", 3 + original.depth)
                    add_rewrite(site.uid, "type", _template(TYPE, value=repaired), (u, p))
                elif site.kind == "call" and provider.kind in (N_FUNC, N_FWD):
                    try:
                        plan_call_rewrite(site, provider, (u, p))
                    except DefaultError as exc:
                        raise PlanError(str(exc)) from None
                elif site.kind == "ident" and provider.kind in (N_FUNC, N_FWD):
                    template = _template(
                        CAST, [_template(TYPE, value=VOID3), _template(INT_LIT, value=0)]
                    )
                    add_rewrite(site.uid, "expr", template, (u, p))
                elif site.kind == "ident" and provider.kind in (N_GLOBAL, N_LOCAL, N_PARAM):
                    decl_type = repair_type(uid_nodes[provider.uid].children[0].value)  # type: ignore[arg-type]
                    try:
                        template = default_value_for(decl_type)
                    except DefaultError as exc:
                        raise PlanError(
                            f"use of deleted {provider.kind} has no repair: {exc}"
                        ) from None
                    add_rewrite(site.uid, "expr", template, (u, p))
                elif site.kind == "goto" and provider.kind == N_LABEL:
                    core.add(u)  # delete the goto statement itself
                elif site.kind == "fwddecl":
                    raise PlanError("a forward declaration outlived its definition")
                else:
                    raise PlanError(
                        f"no repair rule for {provider.kind} referenced via {site.kind}"
                    )
        if (len(core), len(rewrites)) == before:
            break

    # Rewrites planned for sites that closure later swallowed are dropped:
    # the site's text is gone, there is nothing to repair.
    dead_uids = {graph.nodes[i].uid for i in core}
    final_rewrites = []
    for rw in rewrites.values():
        chain = [rw.site_uid, *_uid_ancestors(rw.site_uid, parents)]
        if any(uid in dead_uids for uid in chain):
            continue
        final_rewrites.append(rw)

    # Realize deletions: whole-subtree splices for list elements, positional
    # filters for parameters (definition and forward lists stay in sync) and
    # for surviving call sites' arguments.
    replaced_uids = {rw.site_uid for rw in final_rewrites}

    def buried(uid: int) -> bool:
        return any(
            a in dead_uids or a in replaced_uids for a in _uid_ancestors(uid, parents)
        )

    delete_uids: set[int] = set()
    param_filters: dict[int, set[int]] = {}
    arg_filters: dict[int, set[int]] = {}
    sigs = analyze(tree).functions
    for node_id in core:
        node = graph.nodes[node_id]
        if buried(node.uid):
            continue
        if node.kind == N_PARAM:
            sig = sigs[node.func]
            for decl_uid in (sig.def_uid, sig.fwd_uid):
                if decl_uid is None or uid_nodes[decl_uid].uid in dead_uids \
                        or decl_uid in {graph.nodes[i].uid for i in core}:
                    continue
                plist_uid = uid_nodes[decl_uid].children[1].uid
                param_filters.setdefault(plist_uid, set()).add(node.position)
        elif node.kind == N_ARG:
            if node.call_uid in replaced_uids or buried(node.call_uid):
                continue
            arg_filters.setdefault(node.call_uid, set()).add(node.position)
        elif node.kind in (N_STRUCT, N_FWD, N_FUNC, N_GLOBAL, N_LOCAL, N_LABEL, N_STMT):
            if graph.nodes[node_id].deletable:
                delete_uids.add(node.uid)
            else:
                # A goto in a mandatory position is "deleted" by becoming the
                # empty statement.
                final_rewrites.append(
                    Rewrite(node.uid, "empty-stmt", _template(EMPTY_STMT), (node_id, node_id))
                )

    placeholders: dict[tuple[int, int], int] = {}
    for (u, p) in graph.edges:
        if p in core and u not in core:
            for rw in final_rewrites:
                if rw.edge == (u, p):
                    placeholders[(u, p)] = rw.site_uid
                    break
            else:
                raise PlanError(f"surviving edge ({u}, {p}) has no repair")

    return ReconstructionPlan(
        requested=requested,
        deletions=frozenset(core),
        delete_uids=frozenset(delete_uids),
        rewrites=tuple(final_rewrites),
        param_filters={k: frozenset(v) for k, v in param_filters.items()},
        arg_filters={k: frozenset(v) for k, v in arg_filters.items()},
        placeholders=placeholders,
    )


_LIST_PARENTS = frozenset({PROGRAM, BLOCK, STRUCT_DECL})


class _UidAlloc:
    def __init__(self, start: int):
        self.next = start

    def take(self) -> int:
        uid = self.next
        self.next += 1
        return uid


def _instantiate(template: Node, uid: int, alloc: _UidAlloc) -> Node:
    children = tuple(_instantiate(c, alloc.take(), alloc) for c in template.children)
    return Node(template.kind, children, template.value, uid, None)


def apply(tree: SyntaxTree, plan_: ReconstructionPlan, *, check: bool = True) -> SyntaxTree:
    """Execute a plan; the result parses by construction and must typecheck."""
    alloc = _UidAlloc(tree.next_uid)
    rewrite_map = {rw.site_uid: rw for rw in plan_.rewrites}

    def rebuild(node: Node) -> Optional[Node]:
        if node.uid in plan_.delete_uids:
            return None
        rw = rewrite_map.get(node.uid)
        if rw is not None:
            # The replacement inherits the uid: the site survives, rewritten.
            return _instantiate(rw.template, node.uid, alloc)
        children = node.children
        if node.kind == PARAM_LIST and node.uid in plan_.param_filters:
            drop = plan_.param_filters[node.uid]
            children = tuple(c for i, c in enumerate(children) if i not in drop)
        elif node.kind == CALL and node.uid in plan_.arg_filters:
            drop = plan_.arg_filters[node.uid]
            children = tuple(c for i, c in enumerate(children) if i not in drop)
        rebuilt = []
        changed = len(children) != len(node.children)
        for child in children:
            new_child = rebuild(child)
            if new_child is None:
                if node.kind not in _LIST_PARENTS:
                    raise ApplyError(
                        f"cannot splice {child.kind} out of a {node.kind} position"
                    )
                changed = True
                continue
            changed = changed or new_child is not child
            rebuilt.append(new_child)
        return node.with_children(tuple(rebuilt)) if changed else node

    new_root = rebuild(tree.root)
    assert new_root is not None
    out = SyntaxTree(new_root, None, alloc.next)
    if check:
        errors = [d for d in analyze(out).diagnostics if d.severity == "error"]
        if errors:
            raise ApplyError(
                "reconstructed tree does not typecheck: "
                + "; ".join(str(d) for d in errors)
            )
    return out


def splice_uids(tree: SyntaxTree, uids, *, allow_params: bool = False) -> SyntaxTree:
    """Remove whole subtrees by uid; only list positions may be spliced
    (plus parameter lists when `allow_params` is set)."""
    uids = set(uids)
    list_parents = _LIST_PARENTS | ({PARAM_LIST} if allow_params else set())

    def rebuild(node: Node) -> Optional[Node]:
        if node.uid in uids:
            return None
        rebuilt = []
        changed = False
        for child in node.children:
            new_child = rebuild(child)
            if new_child is None:
                if node.kind not in list_parents:
                    raise ApplyError(
                        f"cannot splice {child.kind} out of a {node.kind} position"
                    )
                changed = True
                continue
            changed = changed or new_child is not child
            rebuilt.append(new_child)
        return node.with_children(tuple(rebuilt)) if changed else node

    new_root = rebuild(tree.root)
    assert new_root is not None
    return SyntaxTree(new_root, None, tree.next_uid)


def apply_bare(tree: SyntaxTree, graph: DependencyGraph, requested) -> SyntaxTree:
    """Ablation mode: splice exactly the requested nodes.

    No group closure, no rewrites, no compilability guarantee; parameters
    are pulled out of their list without touching call sites, which is what
    makes the resulting intermediates fail to compile.
    """
    return splice_uids(
        tree, {graph.nodes[i].uid for i in requested}, allow_params=True
    )
