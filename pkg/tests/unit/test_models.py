"""Tests for model classes."""

import pytest

from deepqna.lang.source import SourceBlock
from deepqna.models import (
    BoundVar,
    Budgets,
    CompletionRequest,
    DecompositionExample,
    Document,
    EventKind,
    Message,
    QuestionSpec,
    Role,
    TaskSpec,
    ThreadStatus,
    TraceEvent,
    Turn,
    Usage,
)
from deepqna.models.world import Anchor, AnchorKind, Hop, HopKind


def test_document_creation(tmp_path):
    """Test creation of documents, from fields and from a text file."""
    document = Document(id="earle-coe", title="Earle Coe", body="# Earle Coe")
    assert document.body == "# Earle Coe"

    # Title on the first line, id from the file name
    path = tmp_path / "reggie-coe.txt"
    path.write_text("Reggie Coe\n# Reggie Coe\n## Family\n", encoding="utf-8")
    loaded = Document.from_file(path)

    assert loaded.id == "reggie-coe"
    assert loaded.title == "Reggie Coe"
    assert loaded.to_text() == path.read_text(encoding="utf-8")


def test_document_validation(tmp_path):
    """Test document validation."""
    with pytest.raises(ValueError):
        Document(id="", title="Earle Coe")
    with pytest.raises(ValueError):
        Document(id="x", title="  ")

    empty = tmp_path / "empty.txt"
    empty.write_text("\nbody\n", encoding="utf-8")
    with pytest.raises(ValueError):
        Document.from_file(empty)
    with pytest.raises(FileNotFoundError):
        Document.from_file(tmp_path / "missing.txt")


def test_task_spec_validation():
    """Test task text and variable names are checked."""
    spec = TaskSpec(task="Count.", variables=[BoundVar(name="scores", value=["3-2"])])
    assert spec.namespace == ""

    with pytest.raises(ValueError):
        TaskSpec(task="   ")
    with pytest.raises(ValueError):
        BoundVar(name="not an identifier")
    with pytest.raises(ValueError):
        TaskSpec(task="t", variables=[BoundVar(name="a"), BoundVar(name="a")])


def test_budget_defaults():
    """Test the default run limits."""
    budgets = Budgets()

    assert budgets.max_depth == 4
    assert budgets.max_turns_per_thread == 12
    assert budgets.max_parallel_children == 8
    assert budgets.observation_char_budget == 4000
    with pytest.raises(ValueError):
        Budgets(max_turns_per_thread=0)
    with pytest.raises(ValueError):
        Budgets(unknown=1)


def test_usage_addition():
    """Test usage counts add field by field."""
    total = Usage(prompt_tokens=10, completion_tokens=5) + Usage(completion_tokens=2, reasoning_tokens=1)

    assert total == Usage(prompt_tokens=10, completion_tokens=7, reasoning_tokens=1)


def test_completion_request_needs_system_first():
    """Test a request must start with the system message."""
    with pytest.raises(ValueError):
        CompletionRequest(messages=[Message(role=Role.USER, content="hi")], thread_label="root")

    request = CompletionRequest(
        messages=[
            Message(role=Role.SYSTEM, content="sys"),
            Message(role=Role.USER, content="first"),
            Message(role=Role.ASSISTANT, content="reply"),
            Message(role=Role.USER, content="second"),
        ],
        thread_label="root",
    )
    assert request.last_user_message == "second"


def test_decomposition_example_validation():
    """Test examples must end in FinalAnswer and observe every earlier turn."""
    final = Turn(code=SourceBlock(text="FinalAnswer(x)"))
    step = Turn(code=SourceBlock(text="x = 1"), observation="No output.")

    assert DecompositionExample(namespace="formal", task="t", turns=(step, final)).code_blocks == 2
    with pytest.raises(ValueError):
        DecompositionExample(namespace="formal", task="t", turns=(step,))
    with pytest.raises(ValueError):
        DecompositionExample(namespace="formal", task="t", turns=(Turn(code=SourceBlock(text="x = 1")), final))


def test_question_chain_validation():
    """Test chain length and hop placement rules."""
    anchor = Anchor(kind=AnchorKind.NAME, value="Earle Coe")
    son = Hop(kind=HopKind.RELATION, name="son")

    with pytest.raises(ValueError):
        QuestionSpec(id="q", anchor=anchor, chain=[], surface="?")
    with pytest.raises(ValueError):
        QuestionSpec(id="q", anchor=anchor, chain=[son] * 6, surface="?")
    with pytest.raises(ValueError):
        QuestionSpec(id="q", anchor=anchor, chain=[Hop(kind=HopKind.COUNT)], surface="?")
    with pytest.raises(ValueError):
        Hop(kind=HopKind.RELATION, name="cousin")
    with pytest.raises(ValueError):
        Anchor(kind=AnchorKind.ATTRIBUTE, key="height", value="2m")


def test_trace_event_depth():
    """Test depth follows the dotted thread id."""
    assert TraceEvent(thread_id="q0.2.1", seq=0, kind=EventKind.THREAD_START).depth == 2
    assert EventKind.FINAL_ANSWER.terminal
    assert not EventKind.OBSERVATION.terminal
    assert ThreadStatus.FAILED.terminal
    assert not ThreadStatus.RUNNING.terminal
