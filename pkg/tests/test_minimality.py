from mcreduce.frontend import parse_source, run_source
from mcreduce.minimality import verify_minimal
from mcreduce.oracle import callable_session
from mcreduce.redcore import reduce_semantic
from mcreduce.semgraph import build_graph
from mcreduce.synred import reduce_syntactic


def marker_session():
    return callable_session(lambda t: "7" in run_source(t).output.splitlines())


def test_removable_statement_is_a_violation():
    report = verify_minimal(
        "int main() { int unused = 1; print(7); return 0; }", marker_session()
    )
    assert not report.minimal
    kinds = {v.kind for v in report.violations}
    assert "semantic" in kinds or "syntactic" in kinds


def test_empty_program_has_no_violations():
    report = verify_minimal("", callable_session(lambda t: True))
    assert report.minimal
    assert report.semantic_checked == 0 and report.syntactic_checked == 0


def test_reducer_output_is_minimal(hello_source):
    decide = lambda t: "714" in run_source(t).output.splitlines()  # noqa: E731
    tree = parse_source(hello_source)
    session = callable_session(decide)
    out, _, _ = reduce_semantic(tree, build_graph(tree), session)
    out, _ = reduce_syntactic(out, session)
    report = verify_minimal(out, callable_session(decide))
    assert report.minimal, [str(v) for v in report.violations]
    assert report.semantic_checked > 0
    assert report.syntactic_checked > 0


def test_non_compiling_program_skips_the_semantic_sweep():
    # Only the syntactic half applies when the program does not typecheck.
    report = verify_minimal("int main() { return x; }", callable_session(lambda t: False))
    assert report.semantic_skipped
    assert report.syntactic_checked > 0
