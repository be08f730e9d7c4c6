"""Tests for the reasoning kernel."""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from deepqna.decompositions import load_bundled_library
from deepqna.kernel import agent
from deepqna.kernel import (
    DeepReasoner,
    MalformedTurn,
    ThreadContext,
    TokenBudget,
    filter_events,
    json_safe,
    parse_turn,
    read_trace,
    serialize_trace,
    trace_usage,
    write_trace,
)
from deepqna.lang import Environment
from deepqna.models.task import Budgets, BoundVar, TaskSpec, ThreadStatus
from deepqna.models.trace import EventKind

VOLLEYBALL = (
    "Which volleyball court in the City by the Bay has hosted the most tournament "
    "matches that went to a tie-break?"
)
EPISODES = "What percentage of all dice rolls across the episodes came up 4?"

ISOLATION_SCRIPT = """
[RULE thread="root" turn=1 channel=model]
<repl>
items = [1, 2]
secret = 42
n = dolores("Append to the list and report its length.", items=items)
FinalAnswer((n, len(items)))
</repl>
[/RULE]

[RULE thread="root.1" turn=1 channel=model]
<repl>
print(secret)
</repl>
[/RULE]

[RULE thread="root.1" turn=2 channel=model]
<repl>
items.append(3)
FinalAnswer(len(items))
</repl>
[/RULE]
"""

DEPTH_SCRIPT = """
[RULE thread="root" turn=1 channel=model]
<repl>
x = dolores("Anything at all.")
</repl>
[/RULE]

[RULE thread="root" turn=2 channel=model]
<repl>
FinalAnswer("done")
</repl>
[/RULE]
"""

MALFORMED_SCRIPT = """
[RULE thread="root" turn=1 channel=model]
I think the answer is obvious, no code needed.
[/RULE]

[RULE thread="root" turn=2 channel=model]
<repl>
FinalAnswer(7)
</repl>
[/RULE]
"""

LOOPING_SCRIPT = """
[RULE thread="root" channel=model]
<repl>
print("still thinking")
</repl>
[/RULE]
"""


def volleyball_run(bundled_gateway, **budgets):
    """Run the volleyball task over its bundled mock script."""
    reasoner = DeepReasoner(
        bundled_gateway("volleyball.mock"),
        load_bundled_library(),
        budgets=Budgets(**budgets),
        timestamps=False,
    )
    return reasoner.run(TaskSpec(task=VOLLEYBALL))


def test_volleyball_end_to_end(bundled_gateway):
    """Test the recursive run finds the court with the most tie-breaks."""
    result = volleyball_run(bundled_gateway)

    assert result.finished
    assert result.answer == "East Beach"
    assert result.failure is None
    assert result.thread_ids[:2] == ["root", "root.1"]
    assert set(result.thread_ids) == {"root"} | {f"root.{i}" for i in range(1, 10)}

    spawns = result.events(EventKind.CHILD_SPAWN)
    namespaces = [e.payload["namespace"] for e in spawns]
    assert namespaces.count("lookup") == 5
    assert namespaces.count("formal") == 4
    assert all(e.payload["parent_id"] == "root" for e in spawns)


def test_volleyball_children_answers(bundled_gateway):
    """Test each counting child returns its court's tie-break count."""
    result = volleyball_run(bundled_gateway)

    answers = {e.thread_id: e.payload["answer"] for e in result.events(EventKind.FINAL_ANSWER)}
    assert answers["root.1"] == ["East Beach", "Crissy Field Beach", "Marina Green Courts", "South End Zone Courts"]
    assert [answers[f"root.{i}"] for i in range(6, 10)] == [4, 2, 1, 3]


@pytest.mark.parametrize("cap", [1, 2, 8])
def test_parallel_cap_does_not_change_answer(bundled_gateway, cap):
    """Test the batch concurrency cap only changes scheduling."""
    result = volleyball_run(bundled_gateway, max_parallel_children=cap)

    assert result.answer == "East Beach"
    dispatches = result.events(EventKind.BATCH_DISPATCH)
    assert [d.payload["max_parallel"] for d in dispatches] == [min(cap, 4), min(cap, 4)]
    assert dispatches[0].payload["children"] == ["root.2", "root.3", "root.4", "root.5"]


def test_episodes_with_seeded_document(bundled_gateway, episodes_document):
    """Test a long document passed as a variable is split and counted by sub-agents."""
    reasoner = DeepReasoner(bundled_gateway("episodes.mock"), load_bundled_library(), timestamps=False)
    spec = TaskSpec(
        task=EPISODES,
        variables=[BoundVar(name="document", value=episodes_document, description="DnD transcript")],
    )
    result = reasoner.run(spec)

    assert result.answer == "2"
    split = filter_events(result.trace, thread_id="root.1", kind=EventKind.FINAL_ANSWER)[0]
    assert len(split.payload["answer"]) == 8
    observations = [e.payload["text"] for e in result.events(EventKind.OBSERVATION, thread_id="root")]
    assert observations[0] == "Found 8 episodes."
    assert observations[1] == "Total rolls: 1188, Total fours: 26, Percentage: 2%"


def test_children_are_isolated(gateway_for):
    """Test a child sees only its variables and works on copies."""
    result = DeepReasoner(gateway_for(ISOLATION_SCRIPT), timestamps=False).run(TaskSpec(task="Isolation."))

    assert result.answer == (3, 2)
    child_observation = result.events(EventKind.OBSERVATION, thread_id="root.1")[0]
    assert child_observation.payload["text"].startswith("Error(name-unbound)")


def test_depth_limit_becomes_host_failure(gateway_for):
    """Test recursion past max_depth is reported to the code, not raised."""
    reasoner = DeepReasoner(gateway_for(DEPTH_SCRIPT), budgets=Budgets(max_depth=0), timestamps=False)
    result = reasoner.run(TaskSpec(task="Try to recurse."))

    assert result.answer == "done"
    observation = result.events(EventKind.OBSERVATION, thread_id="root")[0].payload["text"]
    assert observation.startswith("Error(host-failure): dolores: recursion depth limit 0 reached")
    assert result.events(EventKind.CHILD_SPAWN) == []


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    max_depth=st.integers(min_value=0, max_value=2),
    max_parallel=st.integers(min_value=1, max_value=3),
    max_turns=st.integers(min_value=1, max_value=3),
    fanout=st.integers(min_value=1, max_value=2),
)
def test_budgets_hold_when_every_thread_recurses(gateway_for, max_depth, max_parallel, max_turns, fanout):
    """Test depth, turn and lifecycle limits with a model that always spawns more subtasks."""
    code = "\n".join(['add_task("Go one level deeper.")'] * fanout + ["print(run_all())"])
    script = f"[RULE channel=model]\n<repl>\n{code}\n</repl>\n[/RULE]\n"
    budgets = Budgets(max_depth=max_depth, max_parallel_children=max_parallel, max_turns_per_thread=max_turns)
    result = DeepReasoner(gateway_for(script), budgets=budgets, timestamps=False).run(TaskSpec(task="Recurse."))

    assert result.status is ThreadStatus.BUDGET_EXHAUSTED
    starts = {e.thread_id: e.seq for e in result.events(EventKind.THREAD_START)}
    assert len(starts) == len(result.thread_ids)
    for thread_id in starts:
        assert thread_id.count(".") <= max_depth
        assert len(result.events(EventKind.MODEL_TURN, thread_id=thread_id)) <= max_turns
        assert len([e for e in result.events(thread_id=thread_id) if e.kind.terminal]) == 1

    spawns = result.events(EventKind.CHILD_SPAWN)
    assert {e.payload["child_id"] for e in spawns} == set(starts) - {"root"}
    for spawn in spawns:
        assert spawn.payload["parent_id"] in starts
        assert starts[spawn.payload["parent_id"]] < spawn.seq < starts[spawn.payload["child_id"]]
    for batch in result.events(EventKind.BATCH_DISPATCH):
        assert batch.payload["max_parallel"] <= max_parallel


def test_crashing_subtask_fails_alone(gateway_for, monkeypatch):
    """Test an unexpected exception in one subtask fails that subtask and the batch still returns."""
    script = """
[RULE thread="root" turn=1 channel=model]
<repl>
add_task("Crash.")
add_task("Answer two.")
results = run_all()
</repl>
[/RULE]

[RULE thread="root" turn=2 channel=model]
<repl>
FinalAnswer(results)
</repl>
[/RULE]

[RULE thread="root.1" channel=model]
<repl>
FinalAnswer("crash here")
</repl>
[/RULE]

[RULE thread="root.2" channel=model]
<repl>
FinalAnswer(2)
</repl>
[/RULE]
"""
    original = agent.parse_turn

    def crashing_parse(text):
        if "crash here" in text:
            raise RuntimeError("boom")
        return original(text)

    monkeypatch.setattr(agent, "parse_turn", crashing_parse)
    result = DeepReasoner(gateway_for(script), timestamps=False).run(TaskSpec(task="Batch."))

    assert result.status is ThreadStatus.FINISHED
    assert result.answer == [{"error": "failed", "message": "internal error: RuntimeError: boom"}, 2]
    terminal = [e for e in result.events(thread_id="root.1") if e.kind.terminal]
    assert [e.kind for e in terminal] == [EventKind.ERROR]


def test_turn_budget(gateway_for):
    """Test a thread that never answers stops at its turn budget."""
    reasoner = DeepReasoner(gateway_for(LOOPING_SCRIPT), budgets=Budgets(max_turns_per_thread=3))
    result = reasoner.run(TaskSpec(task="Think forever."))

    assert result.status is ThreadStatus.BUDGET_EXHAUSTED
    assert result.answer is None
    assert len(result.events(EventKind.MODEL_TURN)) == 3
    assert result.trace[-1].kind is EventKind.BUDGET_EXHAUSTED


def test_single_turn_budget(gateway_for):
    """Test max_turns_per_thread=1 allows exactly one model turn."""
    reasoner = DeepReasoner(gateway_for(LOOPING_SCRIPT), budgets=Budgets(max_turns_per_thread=1))
    result = reasoner.run(TaskSpec(task="Think once."))

    assert result.status is ThreadStatus.BUDGET_EXHAUSTED
    assert len(result.events(EventKind.MODEL_TURN)) == 1


def test_malformed_turn_is_retried(gateway_for):
    """Test a turn without code gets a corrective message and another try."""
    result = DeepReasoner(gateway_for(MALFORMED_SCRIPT)).run(TaskSpec(task="Seven."))

    assert result.answer == 7
    turns = result.events(EventKind.MODEL_TURN)
    assert turns[0].payload["malformed"] == "no code block found"
    assert "malformed" not in turns[1].payload


def test_malformed_turn_without_retries_fails(gateway_for):
    """Test the thread fails when no corrective retries are allowed."""
    reasoner = DeepReasoner(gateway_for(MALFORMED_SCRIPT), budgets=Budgets(malformed_turn_retries=0))
    result = reasoner.run(TaskSpec(task="Seven."))

    assert result.status is ThreadStatus.FAILED
    assert result.trace[-1].kind is EventKind.ERROR


def test_token_budget(bundled_gateway):
    """Test the run stops once completion tokens are spent."""
    result = volleyball_run(bundled_gateway, max_total_tokens=1)

    assert result.status is ThreadStatus.BUDGET_EXHAUSTED
    assert result.events(EventKind.BUDGET_EXHAUSTED, thread_id="root")
    first = result.events(EventKind.OBSERVATION, thread_id="root")[0].payload["text"]
    assert "token budget exhausted" in first


def test_backend_failure_ends_run(gateway_for):
    """Test a request with no backend answer fails the run and records why."""
    result = DeepReasoner(gateway_for("# nothing scripted\n")).run(TaskSpec(task="Anything."))

    assert result.status is ThreadStatus.FAILED
    assert "No mock rule matched thread 'root'" in result.failure


def test_root_id_labels_threads(gateway_for):
    """Test a custom root id prefixes every thread."""
    script = (
        '[RULE thread="q7" channel=model]\n<repl>\nFinalAnswer(dolores("One."))\n</repl>\n[/RULE]\n'
        '[RULE thread="q7.1" channel=model]\n<repl>\nFinalAnswer(1)\n</repl>\n[/RULE]\n'
    )
    result = DeepReasoner(gateway_for(script)).run(TaskSpec(task="Delegate."), root_id="q7")

    assert result.root_id == "q7"
    assert result.answer == 1
    assert result.thread_ids == ["q7", "q7.1"]


def test_trace_is_deterministic(bundled_gateway):
    """Test identical runs serialize identically without timestamps."""
    first = volleyball_run(bundled_gateway, max_parallel_children=1)
    second = volleyball_run(bundled_gateway, max_parallel_children=1)

    assert serialize_trace(first.trace) == serialize_trace(second.trace)


def test_per_thread_trace_is_deterministic_in_parallel(bundled_gateway):
    """Test each thread's events repeat exactly even when children interleave."""
    runs = [volleyball_run(bundled_gateway) for _ in range(2)]
    keyed = [sorted(run.trace, key=lambda e: (e.thread_id, e.seq)) for run in runs]

    assert serialize_trace(keyed[0]) == serialize_trace(keyed[1])


def test_sequence_numbers_are_dense(bundled_gateway):
    """Test every thread numbers its events 0, 1, 2 and so on."""
    result = volleyball_run(bundled_gateway)

    for thread_id in result.thread_ids:
        seqs = [e.seq for e in filter_events(result.trace, thread_id=thread_id)]
        assert seqs == list(range(len(seqs)))
        assert filter_events(result.trace, thread_id=thread_id)[-1].kind.terminal


def test_trace_usage_matches_ledger(bundled_gateway):
    """Test usage recovered from the trace agrees with the run's ledger."""
    result = volleyball_run(bundled_gateway)
    recovered = trace_usage(result.trace)

    assert recovered.total == result.usage.total
    assert recovered.thread_count == result.usage.thread_count == 10
    assert recovered.max_thread_completion_tokens == result.usage.max_thread_completion_tokens


def test_filter_events_by_depth(bundled_gateway):
    """Test depth filtering selects child threads only."""
    result = volleyball_run(bundled_gateway)
    children = filter_events(result.trace, depth=1)

    assert children
    assert {e.thread_id for e in children} == {f"root.{i}" for i in range(1, 10)}


def test_write_and_read_trace(tmp_path, bundled_gateway):
    """Test a written trace reads back unchanged."""
    result = volleyball_run(bundled_gateway)
    path = write_trace(result.trace, tmp_path / "trace.jsonl")

    assert read_trace(path) == result.trace


def test_read_trace_rejects_garbage(tmp_path):
    """Test a malformed trace line names its position."""
    path = tmp_path / "trace.jsonl"
    path.write_text('{"thread_id": "root"}\n', encoding="utf-8")

    with pytest.raises(ValueError, match="trace.jsonl:1"):
        read_trace(path)


def test_parse_turn():
    """Test thought and first code block are split out."""
    parsed = parse_turn("Plan first.\n<repl>\nx = 1\nprint(x)\n</repl>\nmore text\n<repl>\ny = 2\n</repl>")

    assert parsed.thought == "Plan first."
    assert parsed.code.text == "x = 1\nprint(x)"
    assert parsed.discarded_blocks == 1
    assert parsed.trailing_text


@pytest.mark.parametrize(
    "text, message",
    [
        ("no code at all", "no code block found"),
        ("<repl>\nx = 1\n", "code block is not closed"),
    ],
)
def test_parse_turn_malformed(text, message):
    """Test turns without a complete block are rejected."""
    with pytest.raises(MalformedTurn, match=message):
        parse_turn(text)


def test_parse_turn_empty_block():
    """Test an empty code block is rejected."""
    with pytest.raises(MalformedTurn):
        parse_turn("<repl>\n\n</repl>")


def test_thread_context():
    """Test child ids are sequential and a thread ends only once."""
    thread = ThreadContext(id="q0", depth=0, namespace="", env=Environment(), budgets=Budgets())

    assert [thread.next_child_id() for _ in range(3)] == ["q0.1", "q0.2", "q0.3"]
    thread.finish(ThreadStatus.FINISHED, answer=1)
    with pytest.raises(RuntimeError):
        thread.finish(ThreadStatus.FAILED)
    with pytest.raises(RuntimeError):
        ThreadContext(id="x", depth=0, namespace="", env=Environment(), budgets=Budgets()).finish(
            ThreadStatus.RUNNING
        )


def test_token_budget_admission():
    """Test reservations block admission until settled."""
    budget = TokenBudget(10)

    assert budget.admit(10)
    assert not budget.admit(1)
    budget.settle(10, 4)
    assert budget.spent == 4
    assert budget.admit(6)
    budget.settle(6, 6)
    assert budget.exhausted


def test_json_safe():
    """Test runtime values become JSON types."""
    assert json_safe({"a": (1, [2.5, None])}) == {"a": [1, [2.5, None]]}
    assert json_safe({1: "x"}) == "{1: 'x'}"
