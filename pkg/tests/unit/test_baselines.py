"""Tests for the tool-calling and code-acting comparison scaffolds."""

import pytest

from deepqna.decompositions import load_bundled_library
from deepqna.harness import (
    MalformedAction,
    parse_action,
    run_codeact_baseline,
    run_react_baseline,
    score_question,
)
from deepqna.kernel import DeepReasoner
from deepqna.models.task import Budgets, TaskSpec, ThreadStatus
from deepqna.models.trace import EventKind

VOLLEYBALL = (
    "Which volleyball court in the City by the Bay has hosted the most tournament "
    "matches that went to a tie-break?"
)


def react_run(gateway, index, question, **budgets):
    """Run one fixture question with the tool-calling scaffold."""
    return run_react_baseline(question.surface, index, gateway, Budgets(**budgets), root_id=question.id)


def test_parse_action():
    """Test the last action line is parsed into a tool call."""
    call = parse_action(
        'Thought: first\nAction: {"name": "search", "arguments": {"query": "a"}}\n'
        'Action: {"name": "retrieve_article", "arguments": {"entity": "Earle Coe"}}'
    )

    assert call.name == "retrieve_article"
    assert call.arguments == {"entity": "Earle Coe"}


@pytest.mark.parametrize(
    "text, message",
    [
        ("Thought: nothing to do", "no action line found"),
        ('Action: {"name": "search", "arguments": ', "no action line found"),
        ('Action: {"name": "search", "arguments": [}', "invalid action"),
        ('Action: {"name": "browse", "arguments": {}}', "invalid action"),
    ],
)
def test_parse_action_malformed(text, message):
    """Test missing, broken and unknown actions are rejected."""
    with pytest.raises(MalformedAction, match=message):
        parse_action(text)


def test_react_premature_answer_scores_zero(bundled_gateway, index, questions):
    """Test stopping after one article gives an empty answer that scores 0."""
    result = react_run(bundled_gateway("phantomwiki_react.mock"), index, questions[0])

    assert result.status is ThreadStatus.FINISHED
    assert result.answer == ""
    assert score_question(questions[0], result.answer) == (0.0, 0.0)
    assert [e.payload["tool"] for e in result.events(EventKind.EXECUTION)] == ["search", "retrieve_article"]
    first_observation = result.events(EventKind.OBSERVATION)[0].payload["text"]
    assert first_observation.startswith("(1) Earle Coe")


def test_react_malformed_turn_is_retried(bundled_gateway, index, questions):
    """Test a turn without an action gets a corrective retry."""
    result = react_run(bundled_gateway("phantomwiki_react.mock"), index, questions[1])

    assert result.answer == ["Reggie Coe"]
    turns = result.events(EventKind.MODEL_TURN)
    assert turns[0].payload["malformed"] == "no action line found"
    assert score_question(questions[1], result.answer) == (1.0, 1.0)


def test_react_malformed_turn_without_retries_fails(bundled_gateway, index, questions):
    """Test the run fails when no corrective retries are allowed."""
    result = react_run(bundled_gateway("phantomwiki_react.mock"), index, questions[1], malformed_turn_retries=0)

    assert result.status is ThreadStatus.FAILED
    assert result.trace[-1].kind is EventKind.ERROR


def test_react_answers_other_questions(bundled_gateway, index, questions):
    """Test the remaining fixture questions are answered correctly."""
    gateway = bundled_gateway("phantomwiki_react.mock")

    for question in questions[2:]:
        result = react_run(gateway, index, question)
        assert score_question(question, result.answer)[0] == 1.0, question.id


def test_react_tool_errors_become_observations(gateway_for, index):
    """Test a missing article is reported to the model with suggestions."""
    script = (
        '[RULE thread="root" turn=1 channel=model]\n'
        'Action: {"name": "retrieve_article", "arguments": {"entity": "Earl Coe"}}\n'
        "[/RULE]\n"
        '[RULE thread="root" turn=2 channel=model]\n'
        'Action: {"name": "final_answer", "arguments": {"answer": "unknown"}}\n'
        "[/RULE]\n"
    )
    result = run_react_baseline("Who is Earl Coe?", index, gateway_for(script))

    observation = result.events(EventKind.OBSERVATION)[0].payload["text"]
    assert observation.startswith("Error: No article titled 'Earl Coe'. Closest titles: Earle Coe")
    assert result.answer == "unknown"


def test_react_turn_budget(gateway_for, index):
    """Test a run that never answers stops at the turn budget."""
    script = '[RULE channel=model]\nAction: {"name": "search", "arguments": {"query": "Coe"}}\n[/RULE]\n'
    result = run_react_baseline("Who?", index, gateway_for(script), Budgets(max_turns_per_thread=4))

    assert result.status is ThreadStatus.BUDGET_EXHAUSTED
    assert len(result.events(EventKind.MODEL_TURN)) == 4


def test_react_backend_failure(gateway_for, index):
    """Test an unscripted request fails the run."""
    result = run_react_baseline("Who?", index, gateway_for("# empty\n"))

    assert result.status is ThreadStatus.FAILED
    assert result.failure is not None


def test_codeact_guess_is_wrong(bundled_gateway, index, questions):
    """Test a single thread that guesses after one hop records the wrong answer."""
    result = run_codeact_baseline(
        questions[0].surface, index, bundled_gateway("phantomwiki_codeact.mock"), root_id="q0"
    )

    assert result.answer == ["Christina Coe"]
    assert score_question(questions[0], result.answer)[0] == 0.0
    code = [e.payload.get("code", "") for e in result.events(EventKind.MODEL_TURN)]
    assert sum(block.count("search(") for block in code) == 1
    assert result.usage.thread_count == 1


def test_codeact_answers_other_questions(bundled_gateway, index, questions):
    """Test scripted parses of the articles answer the other questions."""
    gateway = bundled_gateway("phantomwiki_codeact.mock")

    for question in questions[1:]:
        result = run_codeact_baseline(question.surface, index, gateway, root_id=question.id)
        assert score_question(question, result.answer)[0] == 1.0, question.id
        assert result.usage.thread_count == 1


def test_codeact_has_no_recursion(gateway_for):
    """Test the code-acting thread cannot spawn sub-agents."""
    script = (
        '[RULE thread="root" turn=1 channel=model]\n<repl>\nx = dolores("sub")\n</repl>\n[/RULE]\n'
        '[RULE thread="root" turn=2 channel=model]\n<repl>\nFinalAnswer(0)\n</repl>\n[/RULE]\n'
    )
    result = run_codeact_baseline("Try.", None, gateway_for(script))

    observation = result.events(EventKind.OBSERVATION)[0].payload["text"]
    assert observation.startswith("Error(name-unbound)")
    assert result.answer == 0


def test_codeact_spends_more_tokens_per_thread(bundled_gateway):
    """Test one code-acting thread outspends every thread of the recursive run."""
    codeact = run_codeact_baseline(VOLLEYBALL, None, bundled_gateway("volleyball_codeact.mock"))
    recursive = DeepReasoner(bundled_gateway("volleyball.mock"), load_bundled_library()).run(
        TaskSpec(task=VOLLEYBALL)
    )

    assert codeact.answer == recursive.answer == "East Beach"
    assert codeact.usage.thread_count == 1
    assert recursive.usage.thread_count == 10
    assert codeact.usage.total.completion_tokens > recursive.usage.max_thread_completion_tokens
