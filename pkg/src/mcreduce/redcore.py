"""Stage 2: semantic reduction with dependency reconstruction.

One ddmin search over the semantic candidates.  Each attempt plans the
requested deletion (group closure plus cascades), applies the repairs,
and submits the rewritten program to the oracle.  A deletion is accepted
only when the property holds *and* the token count strictly drops; the
strict decrease is what guarantees termination, since repairs such as
`void***` can otherwise pay back as many tokens as the deletion saved.

On acceptance the graph is updated (deleted nodes out, surviving users'
edges rewired to their placeholder expressions), candidates are
re-classified, and the search restarts over the survivors.

With `reconstruct_deps=False` the same loop runs the ablation: requested
nodes are spliced out verbatim, without closure or repairs, and the
possibly non-compiling result still goes to the oracle.
"""

from __future__ import annotations

import time
from dataclasses import replace
from typing import Optional

from .ddmin import Verdict, init_ddmin, next_candidate, update_ddmin
from .frontend.ast import SyntaxTree, parent_map
from .frontend.printer import count_tokens, print_tree
from .frontend.typecheck import typecheck
from .oracle import InitialPropertyError, OracleSession
from .reconstruct import ApplyError, PlanError, apply, apply_bare, plan
from .report import LogEntry, StageReport
from .semgraph import DependencyGraph, classify_semantic_nodes, update_graph


def _typechecks(tree: SyntaxTree) -> bool:
    return not any(d.severity == "error" for d in typecheck(tree))


def _bare_update(graph: DependencyGraph, requested, tree: SyntaxTree) -> DependencyGraph:
    """Ablation graph update: drop the requested nodes and whatever their
    subtrees contained; dangling edges vanish silently, stragglers stay."""
    parents = parent_map(graph.tree)
    dead_uids = {graph.nodes[i].uid for i in requested}
    deleted = set(requested)
    for node in graph.nodes.values():
        cursor: Optional[int] = node.uid
        while cursor is not None:
            if cursor in dead_uids:
                deleted.add(node.id)
                break
            cursor = parents.get(cursor)
    nodes = {i: n for i, n in graph.nodes.items() if i not in deleted}
    edges = {
        pair: sites
        for pair, sites in graph.edges.items()
        if pair[0] not in deleted and pair[1] not in deleted
    }
    groups = []
    for group in graph.groups:
        if group.representative in deleted:
            continue
        groups.append(replace(group, members=group.members - deleted))
    out = DependencyGraph(nodes, edges, tuple(groups), tree, graph.next_id)
    out.validate()
    return out


def check_initial_property(
    tree: SyntaxTree, session: OracleSession, entries: list[LogEntry], stage: str
) -> None:
    """Submit the unreduced program; a rejection means there is nothing to do."""
    started = time.perf_counter()
    text = print_tree(tree)
    verdict = session.query(text)
    entries.append(
        LogEntry(
            iter=len(entries),
            stage=stage,
            candidate_ids=[],
            verdict="accept" if verdict.accept else "reject",
            tokens_after=count_tokens(tree),
            elapsed_ms=(time.perf_counter() - started) * 1000.0,
            source=verdict.source,
            typechecks=_typechecks(tree),
        )
    )
    if not verdict.accept:
        raise InitialPropertyError("the input program fails the property checker")


def reduce_semantic(
    tree: SyntaxTree,
    graph: DependencyGraph,
    session: OracleSession,
    *,
    reconstruct_deps: bool = True,
    entries: Optional[list[LogEntry]] = None,
    stage: str = "sem",
) -> tuple[SyntaxTree, DependencyGraph, StageReport]:
    started = time.perf_counter()
    entries = entries if entries is not None else []
    first_entry = len(entries)
    queries_before = session.queries

    check_initial_property(tree, session, entries, stage)

    best_tree = tree
    best_graph = graph
    tokens_in = count_tokens(tree)
    best_tokens = tokens_in

    state = init_ddmin(classify_semantic_nodes(best_graph))
    while True:
        requested = next_candidate(state)
        if requested is None:
            break
        attempt_started = time.perf_counter()
        the_plan = None
        candidate_tree = None
        try:
            if reconstruct_deps:
                the_plan = plan(best_graph, requested)
                candidate_tree = apply(best_tree, the_plan)
            else:
                candidate_tree = apply_bare(best_tree, best_graph, requested)
        except (PlanError, ApplyError):
            entries.append(
                LogEntry(
                    iter=len(entries),
                    stage=stage,
                    candidate_ids=sorted(requested),
                    verdict="reject",
                    tokens_after=best_tokens,
                    elapsed_ms=(time.perf_counter() - attempt_started) * 1000.0,
                    source="precheck-reject",
                    typechecks=False,
                )
            )
            state = update_ddmin(state, None, Verdict(False, "precheck-reject"))
            continue

        text = print_tree(candidate_tree)
        tokens = count_tokens(candidate_tree)
        # With reconstruction, apply() already proved compilability.
        compiles = True if reconstruct_deps else _typechecks(candidate_tree)
        verdict = session.query(text)
        accept = verdict.accept and tokens < best_tokens
        entries.append(
            LogEntry(
                iter=len(entries),
                stage=stage,
                candidate_ids=sorted(requested),
                verdict="accept" if accept else "reject",
                tokens_after=tokens,
                elapsed_ms=(time.perf_counter() - attempt_started) * 1000.0,
                source=verdict.source,
                typechecks=compiles,
            )
        )
        if accept:
            best_tree = candidate_tree
            best_tokens = tokens
            if reconstruct_deps:
                best_graph = update_graph(
                    best_graph, the_plan.deletions, the_plan.placeholders, candidate_tree
                )
            else:
                best_graph = _bare_update(best_graph, set(requested), candidate_tree)
            survivors = classify_semantic_nodes(best_graph)
            state = update_ddmin(state, survivors, Verdict(True, verdict.source))
        else:
            state = update_ddmin(state, None, Verdict(False, verdict.source))

    report = StageReport(
        stage=stage,
        iterations=len(entries) - first_entry,
        queries=session.queries - queries_before,
        tokens_in=tokens_in,
        tokens_out=best_tokens,
        time_seconds=time.perf_counter() - started,
    )
    return best_tree, best_graph, report
