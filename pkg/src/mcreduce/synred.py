"""Stage 3: grammar-aware syntactic fixpoint reduction.

Deletion sites are derived from the grammar: elements of starred lists
(top-level declarations, block statements, struct members) and
grammar-optional subtrees (else branches, initializers, whole parameter
lists, return expressions).  Parameter/argument pairs are off limits here;
only the semantic stage can remove those consistently.

Candidates are not repaired: a deletion may leave a program that fails to
compile, and the oracle is expected to reject it.  Sibling lists are
searched with the same ddmin machine the semantic stage uses; optional
subtrees are tried one by one.  Passes repeat until one full pass accepts
nothing.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .ddmin import Verdict, init_ddmin, next_candidate, update_ddmin
from .frontend.ast import (
    BLOCK,
    FUNC_DEF,
    FWD_DECL,
    IF_STMT,
    PROGRAM,
    RETURN_STMT,
    STRUCT_DECL,
    VAR_DECL,
    Node,
    SyntaxTree,
    preorder_index,
)
from .frontend.printer import count_tokens, print_tree
from .frontend.typecheck import typecheck
from .oracle import OracleSession
from .reconstruct import splice_uids
from .redcore import check_initial_property
from .report import LogEntry, StageReport

LIST_ELEMENT = "list-element"
OPTIONAL_SUBTREE = "optional-subtree"


@dataclass(frozen=True)
class DeletionSite:
    uid: int  # the subtree to delete (list elements) or its owner (optionals)
    site_kind: str  # LIST_ELEMENT | OPTIONAL_SUBTREE
    detail: str  # "topdecl" | "stmt" | "member" | "else" | "init" | "paramlist" | "return-expr"
    tokens: int  # tokens removed by deleting this site


def enumerate_sites(tree: SyntaxTree) -> list[DeletionSite]:
    """Every deletion the grammar permits in isolation."""
    sites: list[DeletionSite] = []
    for node in tree.nodes():
        if node.kind == PROGRAM:
            sites.extend(
                DeletionSite(c.uid, LIST_ELEMENT, "topdecl", c.n_tokens) for c in node.children
            )
        elif node.kind == BLOCK:
            sites.extend(
                DeletionSite(c.uid, LIST_ELEMENT, "stmt", c.n_tokens) for c in node.children
            )
        elif node.kind == STRUCT_DECL:
            sites.extend(
                DeletionSite(c.uid, LIST_ELEMENT, "member", c.n_tokens) for c in node.children
            )
        if node.kind == VAR_DECL and len(node.children) > 1:
            sites.append(
                DeletionSite(node.uid, OPTIONAL_SUBTREE, "init", 1 + node.children[1].n_tokens)
            )
        elif node.kind == IF_STMT and len(node.children) > 2:
            sites.append(
                DeletionSite(node.uid, OPTIONAL_SUBTREE, "else", 1 + node.children[2].n_tokens)
            )
        elif node.kind in (FUNC_DEF, FWD_DECL) and node.children[1].children:
            sites.append(
                DeletionSite(node.uid, OPTIONAL_SUBTREE, "paramlist", node.children[1].n_tokens)
            )
        elif node.kind == RETURN_STMT and node.children:
            sites.append(
                DeletionSite(node.uid, OPTIONAL_SUBTREE, "return-expr", node.children[0].n_tokens)
            )
    return sites


def delete_site(tree: SyntaxTree, site: DeletionSite) -> SyntaxTree:
    """Apply one site deletion; the result is grammatical by construction."""
    if site.site_kind == LIST_ELEMENT:
        return splice_uids(tree, {site.uid})

    def rebuild(node: Node) -> Node:
        if node.uid == site.uid:
            if site.detail == "init":
                return node.with_children(node.children[:1])
            if site.detail == "else":
                return node.with_children(node.children[:2])
            if site.detail == "paramlist":
                plist = node.children[1].with_children(())
                return node.with_children((node.children[0], plist, *node.children[2:]))
            if site.detail == "return-expr":
                return node.with_children(())
            raise AssertionError(f"unknown optional site {site.detail!r}")
        children = tuple(rebuild(c) for c in node.children)
        if all(a is b for a, b in zip(children, node.children)):
            return node
        return node.with_children(children)

    return SyntaxTree(rebuild(tree.root), None, tree.next_uid)


def _typechecks(tree: SyntaxTree) -> bool:
    return not any(d.severity == "error" for d in typecheck(tree))


class _Driver:
    def __init__(self, session: OracleSession, entries: list[LogEntry], stage: str):
        self.session = session
        self.entries = entries
        self.stage = stage

    def attempt(self, candidate: SyntaxTree, best_tokens: int, ids: list[int]) -> Optional[int]:
        """Submit a candidate; returns its token count when accepted."""
        started = time.perf_counter()
        tokens = count_tokens(candidate)
        verdict = self.session.query(print_tree(candidate))
        accept = verdict.accept and tokens < best_tokens
        self.entries.append(
            LogEntry(
                iter=len(self.entries),
                stage=self.stage,
                candidate_ids=ids,
                verdict="accept" if accept else "reject",
                tokens_after=tokens,
                elapsed_ms=(time.perf_counter() - started) * 1000.0,
                source=verdict.source,
                typechecks=_typechecks(candidate),
            )
        )
        return tokens if accept else None


def _list_parents(tree: SyntaxTree) -> list[Node]:
    """Nodes owning starred lists, largest subtree first."""
    order = preorder_index(tree)
    parents = [
        n
        for n in tree.nodes()
        if n.kind in (PROGRAM, BLOCK, STRUCT_DECL) and n.children
    ]
    parents.sort(key=lambda n: (-n.n_tokens, order[n.uid]))
    return parents


def _ordered_elements(tree: SyntaxTree, parent_uid: int) -> Optional[list[int]]:
    """Current element uids of a list parent, largest first; None if stale."""
    parent = tree.find(parent_uid)
    if parent is None:
        return None
    order = preorder_index(tree)
    elements = sorted(parent.children, key=lambda c: (-c.n_tokens, order[c.uid]))
    return [c.uid for c in elements]


def reduce_syntactic(
    tree: SyntaxTree,
    session: OracleSession,
    *,
    entries: Optional[list[LogEntry]] = None,
    stage: str = "syn",
) -> tuple[SyntaxTree, StageReport]:
    started = time.perf_counter()
    entries = entries if entries is not None else []
    first_entry = len(entries)
    queries_before = session.queries

    check_initial_property(tree, session, entries, stage)

    best = tree
    tokens_in = count_tokens(tree)
    best_tokens = tokens_in
    driver = _Driver(session, entries, stage)

    while True:
        accepted_any = False

        # Starred lists, each searched with ddmin over its current elements.
        for parent in _list_parents(best):
            elements = _ordered_elements(best, parent.uid)
            if not elements:
                continue  # the parent was deleted earlier in this pass
            state = init_ddmin(elements)
            while True:
                chosen = next_candidate(state)
                if chosen is None:
                    break
                candidate = splice_uids(best, set(chosen))
                tokens = driver.attempt(candidate, best_tokens, sorted(chosen))
                if tokens is not None:
                    best = candidate
                    best_tokens = tokens
                    accepted_any = True
                    survivors = _ordered_elements(best, parent.uid) or []
                    state = update_ddmin(state, survivors, Verdict(True))
                else:
                    state = update_ddmin(state, None, Verdict(False))

        # Grammar-optional subtrees, one at a time, biggest first.
        optionals = [
            s for s in enumerate_sites(best) if s.site_kind == OPTIONAL_SUBTREE
        ]
        order = preorder_index(best)
        optionals.sort(key=lambda s: (-s.tokens, order[s.uid]))
        for site in optionals:
            if best.find(site.uid) is None:
                continue  # removed by an earlier acceptance in this pass
            candidate = delete_site(best, site)
            if count_tokens(candidate) == best_tokens:
                continue  # stale site: the optional part is already gone
            tokens = driver.attempt(candidate, best_tokens, [site.uid])
            if tokens is not None:
                best = candidate
                best_tokens = tokens
                accepted_any = True

        if not accepted_any:
            break

    report = StageReport(
        stage=stage,
        iterations=len(entries) - first_entry,
        queries=session.queries - queries_before,
        tokens_in=tokens_in,
        tokens_out=best_tokens,
        time_seconds=time.perf_counter() - started,
    )
    return best, report
