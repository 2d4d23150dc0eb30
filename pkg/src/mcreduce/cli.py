"""The `mcreduce` command: wire the three stages behind one entry point.

Exit codes: 0 success, 2 the input does not lex/parse/typecheck (or the
flags are invalid), 3 the input itself fails the property checker, 4 the
checker command could not be run at all.
"""

from __future__ import annotations

import argparse
import shlex
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .frontend.ast import FrontendError
from .frontend.parser import parse_source
from .frontend.printer import count_tokens, print_tree
from .frontend.typecheck import typecheck
from .minimality import verify_minimal
from .oracle import (
    DEFAULT_CANDIDATE_NAME,
    DEFAULT_TIMEOUT,
    InitialPropertyError,
    OracleConfig,
    OracleError,
    OracleSession,
)
from .redcore import reduce_semantic
from .report import ReductionReport
from .semgraph import build_graph, to_dot
from .synred import reduce_syntactic

STAGE_CHOICES = ("sem+syn", "sem", "syn")


class InputError(Exception):
    """The input program violates the reducer's precondition."""


@dataclass
class RunConfig:
    input: Path
    oracle: Union[str, Sequence[str]]
    output: Path
    stages: str = "sem+syn"
    ablation_no_reconstruct: bool = False
    timeout: float = DEFAULT_TIMEOUT
    emit_graph: Optional[Path] = None
    metrics_path: Optional[Path] = None
    log_path: Optional[Path] = None
    no_cache: bool = False
    candidate_name: str = DEFAULT_CANDIDATE_NAME

    def __post_init__(self):
        if self.stages not in STAGE_CHOICES:
            raise InputError(f"unknown stages {self.stages!r}")
        if self.stages == "syn" and self.ablation_no_reconstruct:
            raise InputError(
                "--ablation-no-reconstruct is meaningless without the semantic stage"
            )

    def command(self) -> tuple[str, ...]:
        if isinstance(self.oracle, str):
            return tuple(shlex.split(self.oracle))
        return tuple(self.oracle)


def make_session(config: RunConfig) -> OracleSession:
    oracle_config = OracleConfig(
        command=config.command(),
        timeout=config.timeout,
        candidate_name=config.candidate_name,
    )
    return OracleSession(oracle_config, cache=not config.no_cache)


def run(config: RunConfig, session: Optional[OracleSession] = None) -> ReductionReport:
    """Reduce one program; writes the output file and any requested reports.

    `session` can be injected (tests use in-process oracles); by default the
    external command from the config is used.
    """
    source = Path(config.input).read_text(encoding="utf-8")
    tree = parse_source(source)  # FrontendError propagates: exit code 2
    errors = [d for d in typecheck(tree) if d.severity == "error"]
    if errors:
        raise InputError(
            "input does not typecheck: " + "; ".join(str(d) for d in errors)
        )

    if session is None:
        session = make_session(config)

    started = time.perf_counter()
    entries = []
    stage_reports = []
    current = tree

    graph = build_graph(tree)
    if config.emit_graph is not None:
        Path(config.emit_graph).write_text(to_dot(graph), encoding="utf-8")

    if "sem" in config.stages:
        current, graph, stage_report = reduce_semantic(
            current,
            graph,
            session,
            reconstruct_deps=not config.ablation_no_reconstruct,
            entries=entries,
        )
        stage_reports.append(stage_report)
    if "syn" in config.stages:
        current, stage_report = reduce_syntactic(current, session, entries=entries)
        stage_reports.append(stage_report)

    elapsed = time.perf_counter() - started
    Path(config.output).write_text(print_tree(current), encoding="utf-8")

    report = ReductionReport(
        tokens_before=count_tokens(tree),
        tokens_after=count_tokens(current),
        queries=session.queries,
        time_seconds=elapsed,
        stages=stage_reports,
        entries=entries,
    )
    if config.metrics_path is not None:
        report.write_metrics(config.metrics_path)
    if config.log_path is not None:
        report.write_log(config.log_path)
    return report


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcreduce",
        description="Reduce a MicroC program against a property-checker command.",
    )
    parser.add_argument("--input", required=True, type=Path, help="MicroC source file")
    parser.add_argument(
        "--oracle",
        required=True,
        help="property checker command (shell-quoted; exit 0 means the property holds)",
    )
    parser.add_argument("--output", required=True, type=Path, help="reduced program path")
    parser.add_argument("--stages", choices=STAGE_CHOICES, default="sem+syn")
    parser.add_argument(
        "--ablation-no-reconstruct",
        action="store_true",
        help="semantic stage deletes without dependency reconstruction",
    )
    parser.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                        help="per-query timeout in seconds (default: %(default)s)")
    parser.add_argument("--emit-graph", type=Path, metavar="DOT-FILE",
                        help="write the input's dependency graph as DOT")
    parser.add_argument("--metrics", type=Path, metavar="JSON-FILE", dest="metrics")
    parser.add_argument("--log", type=Path, metavar="JSONL-FILE", dest="log")
    parser.add_argument("--no-cache", action="store_true",
                        help="disable verdict caching (nondeterministic oracles)")
    parser.add_argument("--candidate-name", default=DEFAULT_CANDIDATE_NAME,
                        help="candidate filename inside the per-query temp dir")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        config = RunConfig(
            input=args.input,
            oracle=args.oracle,
            output=args.output,
            stages=args.stages,
            ablation_no_reconstruct=args.ablation_no_reconstruct,
            timeout=args.timeout,
            emit_graph=args.emit_graph,
            metrics_path=args.metrics,
            log_path=args.log,
            no_cache=args.no_cache,
            candidate_name=args.candidate_name,
        )
        report = run(config)
    except (FrontendError, InputError) as exc:
        print(f"mcreduce: {exc}", file=sys.stderr)
        return 2
    except InitialPropertyError as exc:
        print(f"mcreduce: {exc}", file=sys.stderr)
        return 3
    except OracleError as exc:
        print(f"mcreduce: {exc}", file=sys.stderr)
        return 4
    print(
        f"reduced {report.tokens_before} -> {report.tokens_after} tokens "
        f"in {report.queries} queries ({report.time_seconds:.2f}s)"
    )
    return 0


__all__ = ["InputError", "RunConfig", "main", "run", "make_session", "verify_minimal"]


if __name__ == "__main__":
    sys.exit(main())
