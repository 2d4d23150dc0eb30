"""Post-hoc 1-minimality audit.

Enumerates every single-candidate semantic deletion (with reconstruction)
and every single syntactic site deletion of a program; any deletion that
still satisfies the property and strictly decreases the token count is a
minimality violation.  Run against reducer output this should find nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .frontend.ast import SyntaxTree
from .frontend.parser import parse_source
from .frontend.printer import count_tokens, print_tree
from .frontend.typecheck import typecheck
from .oracle import OracleSession
from .reconstruct import ApplyError, PlanError, apply, plan
from .semgraph import build_graph, classify_semantic_nodes
from .synred import delete_site, enumerate_sites


@dataclass(frozen=True)
class Violation:
    kind: str  # "semantic" | "syntactic"
    detail: str
    tokens_after: int


@dataclass
class MinimalityReport:
    violations: list[Violation] = field(default_factory=list)
    semantic_checked: int = 0
    syntactic_checked: int = 0
    semantic_skipped: bool = False  # the program no longer typechecks

    @property
    def minimal(self) -> bool:
        return not self.violations


def verify_minimal(
    program: Union[SyntaxTree, str], session: OracleSession
) -> MinimalityReport:
    tree = parse_source(program) if isinstance(program, str) else program
    base_tokens = count_tokens(tree)
    report = MinimalityReport()

    compiles = not any(d.severity == "error" for d in typecheck(tree))
    if compiles:
        graph = build_graph(tree)
        for candidate in classify_semantic_nodes(graph):
            report.semantic_checked += 1
            try:
                candidate_tree = apply(tree, plan(graph, [candidate]))
            except (PlanError, ApplyError):
                continue
            tokens = count_tokens(candidate_tree)
            if tokens >= base_tokens:
                continue
            if session.query(print_tree(candidate_tree)).accept:
                node = graph.nodes[candidate]
                report.violations.append(
                    Violation("semantic", f"{node.kind} id={candidate}", tokens)
                )
    else:
        report.semantic_skipped = True

    for site in enumerate_sites(tree):
        report.syntactic_checked += 1
        candidate_tree = delete_site(tree, site)
        tokens = count_tokens(candidate_tree)
        if tokens >= base_tokens:
            continue
        if session.query(print_tree(candidate_tree)).accept:
            report.violations.append(
                Violation("syntactic", f"{site.detail} uid={site.uid}", tokens)
            )
    return report
