"""Stage 1: the semantic dependency graph.

Nodes enroll syntax-tree declarations and statements; directed edges run
from a user to the provider it needs (identifier use -> declaration,
call -> function definition, type reference -> struct, forward declaration
-> definition, goto -> label).  Mutually dependent nodes that can only be
deleted together are grouped: a parameter with the argument expression at
every call site, and a forward declaration with its definition.

References are attributed to the nearest enrolled ancestor, so a use
buried in an expression charges the statement (or argument) that contains
it.  Return-type nodes enroll as conditioner-only: they gate validity but
are never reduction candidates here, only in the syntactic stage.

Graphs are immutable snapshots; `update_graph` builds the successor graph
after a deletion, rewiring surviving users' edges to the placeholder
expressions that reconstruction substituted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .frontend.ast import (
    BLOCK,
    FUNC_DEF,
    FWD_DECL,
    LABELED_STMT,
    STMT_KINDS,
    STRUCT_DECL,
    TYPE,
    VAR_DECL,
    MicroCType,
    Node,
    SyntaxTree,
    parent_map,
    preorder_index,
)
from .frontend.typecheck import analyze

# Graph node kinds.
N_STRUCT = "struct"
N_FWD = "fwd_decl"
N_FUNC = "func_def"
N_GLOBAL = "global_var"
N_LOCAL = "local_var"
N_PARAM = "param"
N_ARG = "arg"
N_LABEL = "label"
N_STMT = "stmt"
N_RETURN_TYPE = "return_type"
N_PLACEHOLDER = "placeholder"

PROVIDER_KINDS = frozenset({N_STRUCT, N_FWD, N_FUNC, N_GLOBAL, N_LOCAL, N_PARAM, N_LABEL})
# Kinds never offered to the semantic deletion search: group members that a
# representative stands for, conditioners, and reconstruction placeholders.
NON_CANDIDATE_KINDS = frozenset({N_ARG, N_RETURN_TYPE, N_PLACEHOLDER})


class GraphError(Exception):
    pass


class UpdateError(Exception):
    pass


@dataclass(frozen=True)
class RoleSet:
    provider: bool = False
    user: bool = False
    conditioner: bool = False

    def __post_init__(self):
        assert self.provider or self.user or self.conditioner, "role-less node"

    @property
    def conditioner_only(self) -> bool:
        return self.conditioner and not (self.provider or self.user)


@dataclass(frozen=True)
class RefSite:
    """One concrete reference inside a user node's subtree."""

    uid: int
    kind: str  # "ident" | "call" | "type" | "goto" | "fwddecl" | "placeholder"


@dataclass(frozen=True)
class GraphNode:
    id: int
    kind: str
    uid: int  # tree handle
    roles: RoleSet
    deletable: bool  # occupies a position the tree can lose (list element / group)
    func: Optional[str] = None  # param/arg: owning function name
    position: Optional[int] = None  # param/arg: parameter position
    call_uid: Optional[int] = None  # arg: uid of the call expression it belongs to


@dataclass(frozen=True)
class AssociatedGroup:
    kind: str  # "param-arg" | "fwddecl-def"
    members: frozenset[int]
    representative: int
    func: Optional[str] = None
    position: Optional[int] = None


@dataclass(frozen=True)
class DependencyGraph:
    nodes: dict[int, GraphNode]
    edges: dict[tuple[int, int], tuple[RefSite, ...]]  # (user, provider) -> sites
    groups: tuple[AssociatedGroup, ...]
    tree: SyntaxTree
    next_id: int

    def edge_pairs(self) -> list[tuple[int, int]]:
        return list(self.edges.keys())

    def node_for_uid(self, uid: int) -> Optional[GraphNode]:
        for node in self.nodes.values():
            if node.uid == uid:
                return node
        return None

    def groups_of(self, node_id: int) -> list[AssociatedGroup]:
        return [g for g in self.groups if node_id in g.members]

    def validate(self) -> None:
        """Check the structural invariants; raises UpdateError on violation."""
        uids = {n.uid for n in self.tree.nodes()}
        for node in self.nodes.values():
            if node.uid not in uids:
                raise UpdateError(f"node {node.id} ({node.kind}) points at a missing uid")
        for (u, p) in self.edges:
            if u not in self.nodes or p not in self.nodes:
                raise UpdateError(f"dangling edge ({u}, {p})")
            if not self.nodes[u].roles.user:
                raise UpdateError(f"edge user {u} lacks the user role")
            if not self.nodes[p].roles.provider:
                raise UpdateError(f"edge provider {p} lacks the provider role")
        for group in self.groups:
            for member in group.members:
                if member not in self.nodes:
                    raise UpdateError("group references a deleted node")


def _enrolled_ancestor(
    uid: int,
    parents: dict[int, int],
    by_uid: dict[int, GraphNode],
) -> Optional[GraphNode]:
    """Nearest enrolled ancestor-or-self, skipping conditioner-only nodes."""
    cursor: Optional[int] = uid
    while cursor is not None:
        node = by_uid.get(cursor)
        if node is not None and not node.roles.conditioner_only:
            return node
        cursor = parents.get(cursor)
    return None


def build_graph(tree: SyntaxTree) -> DependencyGraph:
    """Construct the dependency graph of a typechecking tree."""
    analysis = analyze(tree)
    if analysis.errors:
        raise GraphError(
            "tree does not typecheck: " + "; ".join(str(d) for d in analysis.errors)
        )

    parents = parent_map(tree)
    nodes: dict[int, GraphNode] = {}
    by_uid: dict[int, GraphNode] = {}
    next_id = 0

    def enroll(kind: str, tree_node: Node, deletable: bool, **meta) -> GraphNode:
        nonlocal next_id
        existing = by_uid.get(tree_node.uid)
        if existing is not None:
            return existing
        roles = RoleSet(
            provider=kind in PROVIDER_KINDS,
            user=kind in (N_STMT, N_ARG, N_FWD),
            conditioner=kind == N_RETURN_TYPE,
        )
        node = GraphNode(next_id, kind, tree_node.uid, roles, deletable, **meta)
        nodes[node.id] = node
        by_uid[tree_node.uid] = node
        next_id += 1
        return node

    def stmt_kind(stmt: Node) -> str:
        if stmt.kind == VAR_DECL:
            return N_LOCAL
        if stmt.kind == LABELED_STMT:
            return N_LABEL
        return N_STMT

    def enroll_stmt(stmt: Node, deletable: bool) -> None:
        enroll(stmt_kind(stmt), stmt, deletable)
        # Children of a block are deletable list elements; statements in
        # mandatory positions (if/while/else/label bodies) are not, but
        # declarations, labels and gotos still enroll there so their edges
        # and providers exist.
        if stmt.kind == BLOCK:
            for child in stmt.children:
                enroll_stmt(child, True)
        elif stmt.kind == LABELED_STMT:
            enroll_stmt(stmt.children[0], False)
        else:
            for child in stmt.children:
                if child.kind in STMT_KINDS:
                    enroll_stmt(child, False)

    # Top-level declarations, their parameters and return types, statements.
    for decl in tree.root.children:
        if decl.kind == STRUCT_DECL:
            enroll(N_STRUCT, decl, True)
        elif decl.kind == VAR_DECL:
            enroll(N_GLOBAL, decl, True)
        elif decl.kind in (FWD_DECL, FUNC_DEF):
            enroll(N_FWD if decl.kind == FWD_DECL else N_FUNC, decl, True)
            enroll(N_RETURN_TYPE, decl.children[0], False)
            if decl.kind == FUNC_DEF:
                enroll_stmt(decl.children[2], False)

    # Parameters of each function's primary declaration (the definition when
    # one exists, the forward declaration otherwise).
    uid_nodes = {n.uid: n for n in tree.nodes()}
    for sig in analysis.functions.values():
        primary_uids = sig.def_param_uids if sig.def_uid is not None else sig.fwd_param_uids
        for position, uid in enumerate(primary_uids):
            enroll(N_PARAM, uid_nodes[uid], True, func=sig.name, position=position)

    # Argument expressions at every resolved call site.
    for call_uid, name in analysis.call_bindings.items():
        call = uid_nodes[call_uid]
        for position, arg in enumerate(call.children):
            enroll(N_ARG, arg, False, func=name, position=position, call_uid=call_uid)

    # Edges.  Each binding contributes (user, provider) with a concrete site.
    edges: dict[tuple[int, int], list[RefSite]] = {}
    user_ids: set[int] = set()

    def add_edge(site_uid: int, site_kind: str, provider_uid: int) -> None:
        user = _enrolled_ancestor(site_uid, parents, by_uid)
        provider = by_uid.get(provider_uid)
        if user is None or provider is None:
            raise GraphError(f"reference at uid {site_uid} has no enrolled endpoint")
        if user.id == provider.id:
            return  # a declaration referencing itself needs no edge
        edges.setdefault((user.id, provider.id), []).append(RefSite(site_uid, site_kind))
        user_ids.add(user.id)

    for use_uid, decl_uid in analysis.var_uses.items():
        add_edge(use_uid, "ident", decl_uid)
    for use_uid, name in analysis.func_value_uses.items():
        add_edge(use_uid, "ident", analysis.functions[name].provider_uid)
    for call_uid, name in analysis.call_bindings.items():
        add_edge(call_uid, "call", analysis.functions[name].provider_uid)
    for type_uid, struct_uid in analysis.type_bindings.items():
        add_edge(type_uid, "type", struct_uid)
    for goto_uid, label_uid in analysis.goto_bindings.items():
        add_edge(goto_uid, "goto", label_uid)
    for sig in analysis.functions.values():
        if sig.fwd_uid is not None and sig.def_uid is not None:
            fwd = by_uid[sig.fwd_uid]
            edges.setdefault((fwd.id, by_uid[sig.def_uid].id), []).append(
                RefSite(sig.fwd_uid, "fwddecl")
            )
            user_ids.add(fwd.id)

    # Nodes with outgoing references gain the user role.
    for node_id in user_ids:
        node = nodes[node_id]
        if not node.roles.user:
            nodes[node_id] = replace(node, roles=replace(node.roles, user=True))

    # Associated groups.
    groups: list[AssociatedGroup] = []
    args_by_func: dict[tuple[str, int], list[int]] = {}
    for node in nodes.values():
        if node.kind == N_ARG:
            args_by_func.setdefault((node.func, node.position), []).append(node.id)
    for sig in analysis.functions.values():
        primary_uids = sig.def_param_uids if sig.def_uid is not None else sig.fwd_param_uids
        for position, uid in enumerate(primary_uids):
            param = by_uid[uid]
            members = frozenset(
                [param.id] + args_by_func.get((sig.name, position), [])
            )
            groups.append(
                AssociatedGroup("param-arg", members, param.id, sig.name, position)
            )
        if sig.fwd_uid is not None and sig.def_uid is not None:
            fwd_id = by_uid[sig.fwd_uid].id
            def_id = by_uid[sig.def_uid].id
            groups.append(
                AssociatedGroup(
                    "fwddecl-def", frozenset({fwd_id, def_id}), def_id, sig.name, None
                )
            )

    graph = DependencyGraph(
        nodes=nodes,
        edges={pair: tuple(sites) for pair, sites in edges.items()},
        groups=tuple(groups),
        tree=tree,
        next_id=next_id,
    )
    graph.validate()
    return graph


def classify_semantic_nodes(graph: DependencyGraph) -> list[int]:
    """Reduction candidates: provider/user nodes, largest subtree first.

    Conditioner-only nodes are excluded, as are group members that their
    representative stands for (arguments, grouped forward declarations) and
    placeholders left behind by earlier reconstructions.
    """
    represented: set[int] = set()
    for group in graph.groups:
        represented.update(group.members - {group.representative})

    uid_nodes = {n.uid: n for n in graph.tree.nodes()}
    order = preorder_index(graph.tree)
    candidates = []
    for node in graph.nodes.values():
        if node.kind in NON_CANDIDATE_KINDS or node.id in represented:
            continue
        if not node.deletable:
            continue
        if node.roles.conditioner_only or not (node.roles.provider or node.roles.user):
            continue
        candidates.append(node)
    candidates.sort(key=lambda n: (-uid_nodes[n.uid].n_tokens, order[n.uid]))
    return [n.id for n in candidates]


def update_graph(
    graph: DependencyGraph,
    deleted: Iterable[int],
    placeholders: dict[tuple[int, int], int],
    tree: SyntaxTree,
) -> DependencyGraph:
    """Successor graph after deleting `deleted` and rewriting the tree.

    `placeholders` maps each surviving-user edge into a deleted provider to
    the uid of the replacement expression in the new tree; those edges are
    rewired to freshly enrolled placeholder nodes.  Everything else carries
    over unchanged (uids are stable across rewrites).
    """
    deleted = set(deleted)
    unknown = deleted - graph.nodes.keys()
    if unknown:
        raise UpdateError(f"deleting unknown node ids {sorted(unknown)}")

    nodes = {i: n for i, n in graph.nodes.items() if i not in deleted}
    next_id = graph.next_id
    edges: dict[tuple[int, int], tuple[RefSite, ...]] = {}

    structs_by_name = {
        str(graph.tree.find(n.uid).value): i
        for i, n in graph.nodes.items()
        if n.kind == N_STRUCT and i not in deleted
    }

    def struct_refs(uid: int) -> list[RefSite]:
        """Type references inside a replacement expression.  A placeholder
        such as `(struct S*)0` keeps its struct alive; recording the edge is
        what lets a later deletion of S rewrite the cast instead of being
        blocked by it."""
        root = tree.find(uid)
        refs = []
        if root is not None:
            for node in root.walk():
                t = node.value
                if node.kind == TYPE and isinstance(t, MicroCType) and t.struct \
                        and t.base in structs_by_name:
                    refs.append(RefSite(node.uid, "type"))
        return refs

    for (u, p), sites in graph.edges.items():
        if u in deleted:
            continue
        if p in deleted:
            if (u, p) not in placeholders:
                raise UpdateError(f"edge ({u}, {p}) would dangle: no placeholder")
            ph_uid = placeholders[(u, p)]
            refs = struct_refs(ph_uid)
            ph = GraphNode(
                next_id, N_PLACEHOLDER, ph_uid,
                RoleSet(provider=True, user=bool(refs)), False,
            )
            nodes[ph.id] = ph
            next_id += 1
            edges[(u, ph.id)] = (RefSite(ph_uid, "placeholder"),)
            for ref in refs:
                key = (ph.id, structs_by_name[tree.find(ref.uid).value.base])
                edges[key] = edges.get(key, ()) + (ref,)
        else:
            edges[(u, p)] = sites

    groups = []
    for group in graph.groups:
        if group.representative in deleted:
            stragglers = group.members - deleted
            if stragglers:
                raise UpdateError(
                    f"group members {sorted(stragglers)} survived their representative"
                )
            continue
        groups.append(replace(group, members=group.members - deleted))

    out = DependencyGraph(nodes, edges, tuple(groups), tree, next_id)
    out.validate()
    return out


def to_dot(graph: DependencyGraph) -> str:
    """Render the graph as DOT; labels are node kind plus source span."""
    uid_nodes = {n.uid: n for n in graph.tree.nodes()}
    lines = ["digraph semgraph {", "  node [shape=box, fontsize=10];"]
    for node in graph.nodes.values():
        span = uid_nodes[node.uid].span
        where = f"{span[0]}..{span[1]}" if span else "synthetic"
        roles = "".join(
            flag
            for flag, on in zip(
                "PUC", (node.roles.provider, node.roles.user, node.roles.conditioner)
            )
            if on
        )
        lines.append(f'  n{node.id} [label="{node.kind} [{roles}] @{where}"];')
    for (u, p) in graph.edges:
        lines.append(f"  n{u} -> n{p};")
    for i, group in enumerate(graph.groups):
        members = sorted(group.members)
        for a, b in zip(members, members[1:]):
            lines.append(f'  n{a} -> n{b} [dir=none, style=dashed, label="{group.kind}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
