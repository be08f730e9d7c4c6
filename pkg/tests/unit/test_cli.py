"""Tests for the command line interface."""

import json

import pytest

from deepqna.cli.main import main

VOLLEYBALL = (
    "Which volleyball court in the City by the Bay has hosted the most tournament "
    "matches that went to a tie-break?"
)


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command from a scratch directory so logs stay out of the tree."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_no_command():
    """Test a bare invocation prints help and exits with the config-error status."""
    assert main([]) == 2


def test_unknown_flag():
    """Test usage errors exit with the config-error status."""
    assert main(["run", "task", "--bogus"]) == 2


def test_run_success(workdir, capsys):
    """Test a mock run prints the answer and writes the run directory."""
    out = workdir / "out"
    code = main(["run", VOLLEYBALL, "--mock", "volleyball.mock", "-o", str(out), "--no-timestamps"])

    assert code == 0
    assert capsys.readouterr().out.splitlines()[0] == "East Beach"
    answer = json.loads((out / "answer.json").read_text(encoding="utf-8"))
    assert answer["answer"] == "East Beach"
    assert answer["status"] == "finished"
    assert (out / "trace.jsonl").is_file()
    assert json.loads((out / "usage.json").read_text(encoding="utf-8"))["thread_count"] == 10
    assert '"ts"' not in (out / "trace.jsonl").read_text(encoding="utf-8")


def test_run_with_seeded_variable(workdir, capsys, episodes_document):
    """Test --var seeds the root environment."""
    code = main(
        [
            "run",
            "What percentage of the dice rolls came up 4?",
            "--mock",
            "episodes.mock",
            "--var",
            f"document={json.dumps(episodes_document)}",
            "-o",
            str(workdir / "out"),
        ]
    )

    assert code == 0
    assert capsys.readouterr().out.splitlines()[0] == "2"


def test_run_rejects_bad_variable(workdir):
    """Test a variable without a value is a config error."""
    assert main(["run", "task", "--mock", "volleyball.mock", "--var", "novalue", "-o", str(workdir)]) == 2


def test_run_rejects_credential_in_config(workdir):
    """Test a config file holding a credential is refused."""
    config = workdir / "deepqna.ini"
    config.write_text("[gateway]\napi_key = sk-not-allowed\n", encoding="utf-8")

    assert main(["run", "task", "--config", str(config), "--mock", "volleyball.mock"]) == 2


def test_run_missing_mock_script(workdir):
    """Test a mock script that is neither a file nor bundled is a config error."""
    assert main(["run", "task", "--mock", "missing.mock", "-o", str(workdir)]) == 2


def test_run_backend_error(workdir, capsys):
    """Test an unscripted request exits with the backend-error status."""
    script = workdir / "empty.mock"
    script.write_text("# no rules\n", encoding="utf-8")

    assert main(["run", "task", "--mock", str(script), "-o", str(workdir / "out")]) == 3
    assert "Backend error" in capsys.readouterr().out


def test_run_budget_exhausted(workdir):
    """Test a run that runs out of turns exits with the task-failed status."""
    code = main(["run", VOLLEYBALL, "--mock", "volleyball.mock", "--max-turns", "1", "-o", str(workdir / "out")])

    assert code == 1
    answer = json.loads((workdir / "out" / "answer.json").read_text(encoding="utf-8"))
    assert answer["status"] == "budget-exhausted"


def test_bench_fixture(workdir, capsys):
    """Test a fixture sweep writes scores, the report and per-question traces."""
    out = workdir / "bench"
    code = main(["bench", "--fixture", "--mock", "phantomwiki.mock", "-o", str(out), "--no-progress"])

    assert code == 0
    lines = (out / "scores.jsonl").read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[0])["aggregate"] == 1.0
    assert len(lines) == 6
    assert (out / "traces" / "q0.jsonl").is_file()
    assert "aggregate: 1.000" in capsys.readouterr().out


def test_bench_react_fixture(workdir):
    """Test the tool-calling sweep exits 0 whatever it scores."""
    out = workdir / "react"
    code = main(
        ["bench", "--fixture", "-s", "react", "--mock", "phantomwiki_react.mock", "-o", str(out), "--no-progress"]
    )

    assert code == 0
    summary = json.loads((out / "scores.jsonl").read_text(encoding="utf-8").splitlines()[0])
    assert summary["aggregate"] == pytest.approx(0.8)


def test_bench_requires_world_with_questions(workdir):
    """Test a question file without its world is a config error."""
    questions = workdir / "questions.jsonl"
    questions.write_text("", encoding="utf-8")

    assert main(["bench", "--questions", str(questions), "--mock", "phantomwiki.mock"]) == 2


def test_world_gen_is_reproducible(workdir):
    """Test identical arguments write byte-identical files."""
    args = ["world", "gen", "--size", "12", "--seed", "3", "--questions", "5"]

    assert main(args + ["-o", str(workdir / "a")]) == 0
    assert main(args + ["-o", str(workdir / "b")]) == 0
    for name in ("world.jsonl", "corpus.jsonl", "questions.jsonl"):
        assert (workdir / "a" / name).read_bytes() == (workdir / "b" / name).read_bytes()


def test_generated_world_feeds_bench(workdir):
    """Test bench accepts a generated world and question set."""
    assert main(["world", "gen", "--size", "12", "--seed", "3", "--questions", "2", "-o", str(workdir / "w")]) == 0

    script = workdir / "giveup.mock"
    script.write_text('[RULE channel=model]\n<repl>\nFinalAnswer("unknown")\n</repl>\n[/RULE]\n', encoding="utf-8")
    code = main(
        [
            "bench",
            "--questions",
            str(workdir / "w" / "questions.jsonl"),
            "--world",
            str(workdir / "w" / "world.jsonl"),
            "--mock",
            str(script),
            "-o",
            str(workdir / "out"),
            "--no-progress",
        ]
    )
    assert code == 0


def test_world_gen_rejects_bad_hops(workdir):
    """Test max hops outside the allowed range is a config error."""
    assert main(["world", "gen", "--max-hops", "9", "-o", str(workdir)]) == 2


def test_examples_lint(capsys):
    """Test linting the bundled library lists its namespaces."""
    assert main(["examples", "lint"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "3 examples, 3 namespaces"
    assert "  lookup: 1" in out


def test_examples_lint_bad_file(workdir):
    """Test a malformed library is a config error."""
    path = workdir / "bad.decomp"
    path.write_text("stray text\n", encoding="utf-8")

    assert main(["examples", "lint", str(path)]) == 2


def test_trace_show(workdir, capsys):
    """Test showing a trace filters events and prints the usage table."""
    out = workdir / "out"
    main(["run", VOLLEYBALL, "--mock", "volleyball.mock", "-o", str(out)])
    capsys.readouterr()

    assert main(["trace", "show", str(out / "trace.jsonl"), "--kind", "final-answer"]) == 0
    lines = capsys.readouterr().out.splitlines()
    finals = [line for line in lines if "final-answer" in line]
    assert len(finals) == 10
    assert any(line.startswith("TOTAL") for line in lines)


def test_trace_show_missing_file(workdir):
    """Test a missing trace file is a config error."""
    assert main(["trace", "show", str(workdir / "missing.jsonl")]) == 2
