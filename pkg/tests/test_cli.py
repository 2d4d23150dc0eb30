import json
import sys

import pytest

from conftest import CORPUS_DIR
from corpus_oracles import oracle_for
from mcreduce.cli import InputError, RunConfig, main, run
from mcreduce.frontend import count_tokens, lex, run_source
from mcreduce.oracle import callable_session

HELLO = CORPUS_DIR / "hello.mc"
HELLO_ORACLE = f"{sys.executable} {CORPUS_DIR / 'hello.check.py'}"


def hello_session():
    return callable_session(lambda t: "714" in run_source(t).output.splitlines())


def make_config(tmp_path, **overrides):
    defaults = dict(
        input=HELLO,
        oracle=HELLO_ORACLE,
        output=tmp_path / "out.mc",
        metrics_path=tmp_path / "metrics.json",
        log_path=tmp_path / "log.jsonl",
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def test_end_to_end_with_external_oracle(tmp_path):
    # The one full-subprocess pipeline test; everything else injects
    # in-process sessions for speed.
    config = make_config(
        tmp_path,
        input=CORPUS_DIR / "t01_deadfn.mc",
        oracle=f"{sys.executable} {CORPUS_DIR / 't01_deadfn.check.py'}",
    )
    report = run(config)
    out_text = (tmp_path / "out.mc").read_text()
    assert report.tokens_after < report.tokens_before
    assert count_tokens(out_text) == report.tokens_after
    assert "9001" in run_source(out_text).output.splitlines()


def test_metrics_schema(tmp_path):
    config = make_config(tmp_path)
    report = run(config, session=hello_session())
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert set(metrics) == {
        "tokens_before",
        "tokens_after",
        "queries",
        "time_seconds",
        "stages",
    }
    assert metrics["tokens_before"] == 74
    assert metrics["tokens_after"] == report.tokens_after <= 21
    assert [s["stage"] for s in metrics["stages"]] == ["sem", "syn"]
    assert metrics["queries"] == report.queries


def test_log_lines_have_spec_fields(tmp_path):
    config = make_config(tmp_path)
    run(config, session=hello_session())
    lines = (tmp_path / "log.jsonl").read_text().splitlines()
    assert lines
    for line in lines:
        entry = json.loads(line)
        assert {"iter", "candidate_ids", "verdict", "tokens_after", "elapsed_ms"} <= set(entry)
        assert entry["stage"] in ("sem", "syn")


def test_report_integrity(tmp_path):
    config = make_config(tmp_path)
    report = run(config, session=hello_session())
    assert report.tokens_after == count_tokens((tmp_path / "out.mc").read_text())
    assert report.tokens_after <= report.tokens_before


def test_determinism_byte_identical(tmp_path):
    out1 = run(make_config(tmp_path, output=tmp_path / "a.mc"), session=hello_session())
    out2 = run(make_config(tmp_path, output=tmp_path / "b.mc"), session=hello_session())
    assert (tmp_path / "a.mc").read_bytes() == (tmp_path / "b.mc").read_bytes()
    assert out1.queries == out2.queries


def test_stage_composition(tmp_path):
    full = run(make_config(tmp_path, output=tmp_path / "full.mc"), session=hello_session())
    sem = run(
        make_config(tmp_path, output=tmp_path / "sem.mc", stages="sem"),
        session=hello_session(),
    )
    assert full.tokens_after <= sem.tokens_after


def test_syn_only_keeps_param_pair(tmp_path):
    config = make_config(tmp_path, stages="syn", output=tmp_path / "syn.mc")
    report = run(config, session=hello_session())
    lexemes = {t.lexeme for t in lex((tmp_path / "syn.mc").read_text())}
    assert "uselessParam" in lexemes and "uselessArg" in lexemes
    assert report.stages[0].stage == "syn"


def test_emit_graph(tmp_path):
    config = make_config(tmp_path, emit_graph=tmp_path / "g.dot")
    run(config, session=hello_session())
    dot = (tmp_path / "g.dot").read_text()
    assert dot.startswith("digraph") and "->" in dot


def test_ablation_with_syn_only_rejected(tmp_path):
    with pytest.raises(InputError):
        make_config(tmp_path, stages="syn", ablation_no_reconstruct=True)


def test_ablation_runs_and_is_weaker(tmp_path):
    entry = next(e for e in json.load(open(CORPUS_DIR / "manifest.json"))
                 if e["file"] == "t05_fwd.mc")
    decide = oracle_for(entry)
    on = run(
        make_config(
            tmp_path,
            input=CORPUS_DIR / "t05_fwd.mc",
            stages="sem",
            output=tmp_path / "on.mc",
        ),
        session=callable_session(decide),
    )
    off = run(
        make_config(
            tmp_path,
            input=CORPUS_DIR / "t05_fwd.mc",
            stages="sem",
            ablation_no_reconstruct=True,
            output=tmp_path / "off.mc",
        ),
        session=callable_session(decide),
    )
    assert on.tokens_after < off.tokens_after
    assert on.queries < off.queries


def test_exit_code_parse_error(tmp_path):
    bad = tmp_path / "bad.mc"
    bad.write_text("int f(;")
    code = main(
        ["--input", str(bad), "--oracle", "true", "--output", str(tmp_path / "o.mc")]
    )
    assert code == 2


def test_exit_code_typecheck_error(tmp_path):
    bad = tmp_path / "bad.mc"
    bad.write_text("int main() { return y; }")
    code = main(
        ["--input", str(bad), "--oracle", "true", "--output", str(tmp_path / "o.mc")]
    )
    assert code == 2


def test_exit_code_initial_property_failure(tmp_path):
    code = main(
        ["--input", str(HELLO), "--oracle", "false", "--output", str(tmp_path / "o.mc")]
    )
    assert code == 3


def test_exit_code_oracle_infrastructure(tmp_path):
    code = main(
        [
            "--input",
            str(HELLO),
            "--oracle",
            "/nonexistent/oracle-binary",
            "--output",
            str(tmp_path / "o.mc"),
        ]
    )
    assert code == 4


def test_trivially_true_oracle_empties_everything(tmp_path):
    config = make_config(tmp_path)
    report = run(config, session=callable_session(lambda t: True))
    assert report.tokens_after == 0
    assert (tmp_path / "out.mc").read_text() == ""
