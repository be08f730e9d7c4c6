"""Tests for the formal language."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepqna.lang import (
    DescribedValue,
    Effect,
    Environment,
    ErrorKind,
    EvalLimits,
    EvalOutcome,
    HostFunction,
    HostHandle,
    HostRegistry,
    LexError,
    NO_OUTPUT,
    ParseError,
    SourceBlock,
    evaluate,
    evaluate_source,
    final_answer_host,
    parse,
    render_observation,
    tokenize,
)


def run(source, **bindings):
    """Evaluate a block in a fresh environment seeded with bindings."""
    env = Environment(bindings)
    return evaluate_source(source, env, HostRegistry([final_answer_host()])), env


def test_tokenize_assignment():
    """Test the smallest assignment tokenizes to ident, assign, number."""
    tokens = tokenize("x = 1")

    assert [t.kind for t in tokens[:3]] == ["ident", "assign", "number"]
    assert [t.text for t in tokens[:3]] == ["x", "=", "1"]
    assert tokens[0].span.line == 1 and tokens[0].span.column == 1


def test_tokenize_interpolated_string():
    """Test an f-string becomes one token with its embedded regions."""
    tokens = tokenize('f"zip code of {y}"')

    assert tokens[0].kind == "interpolated-string"
    assert [r.text for r in tokens[0].regions] == ["y"]


def test_tokenize_leaves_grammar_errors_to_the_parser():
    """Test a doubled assignment lexes fine and fails to parse at the second '='."""
    tokens = tokenize("count = = 3")
    assert [t.kind for t in tokens[:4]] == ["ident", "assign", "assign", "number"]

    with pytest.raises(ParseError) as exc_info:
        parse("count = = 3")
    assert exc_info.value.span.line == 1
    assert exc_info.value.span.column == 9


def test_lex_errors():
    """Test unterminated strings and illegal characters raise LexError."""
    with pytest.raises(LexError):
        tokenize('x = "abc')
    with pytest.raises(LexError):
        parse("x = 1 $ 2")


def test_parse_statement_count():
    """Test programs keep one node per statement."""
    assert len(parse("x = 1\nx + 2").statements) == 2
    assert len(parse("x = 1; y = 2; x + y").statements) == 3
    assert len(parse("count = sum(1 for s in scores if s in ('3-2', '2-3'))").statements) == 1


def test_parse_accepts_source_blocks():
    """Test parse takes a SourceBlock as well as plain text."""
    block = SourceBlock(text="print(1)")

    assert len(parse(block).statements) == 1


def test_source_block_rejects_delimiters():
    """Test a source block may not contain turn delimiter lines."""
    with pytest.raises(ValueError):
        SourceBlock(text="x = 1\n</repl>\n")
    with pytest.raises(ValueError):
        SourceBlock(text="   ")


def test_evaluate_result_of_last_expression():
    """Test the result is the value of the final expression statement."""
    outcome, env = run("x = 1\nx + 2")

    assert outcome.result == 3
    assert outcome.error is None
    assert env.lookup("x") == 1


def test_evaluate_generator_in_aggregator():
    """Test counting tie-break scores with a generator expression."""
    outcome, _ = run(
        "sum(1 for s in scores if s in ('3-2', '2-3'))",
        scores=["3-2", "3-0", "3-1", "3-2", "2-3"],
    )

    assert outcome.result == 3


def test_evaluate_max_with_key():
    """Test max over a map keyed by its own get method."""
    tiebreaks = {
        "East Beach": 14,
        "Crissy Field Beach": 8,
        "Marina Green Courts": 5,
        "South End Zone Courts": 11,
    }
    outcome, _ = run("max(tiebreaks, key=tiebreaks.get)", tiebreaks=tiebreaks)

    assert outcome.result == "East Beach"


def test_max_ties_keep_first_occurrence():
    """Test ties in max and min go to the first item."""
    outcome, _ = run("(max(d, key=d.get), min(d, key=d.get))", d={"a": 2, "b": 2, "c": 1, "e": 1})

    assert outcome.result == ("a", "c")


def test_evaluate_index_out_of_range():
    """Test indexing past the end is an index-out-of-range error."""
    outcome, _ = run("y[10]", y=[1, 2, 3])

    assert outcome.error is not None
    assert outcome.error.kind is ErrorKind.INDEX_OUT_OF_RANGE
    assert outcome.error.line == 1


def test_evaluate_error_kinds():
    """Test each runtime failure maps to its error kind."""
    cases = {
        "undefined_name + 1": ErrorKind.NAME_UNBOUND,
        "'a' + 1": ErrorKind.TYPE_MISMATCH,
        "{'a': 1}['b']": ErrorKind.KEY_MISSING,
        "'abc'.foo()": ErrorKind.TYPE_MISMATCH,
        "1 / 0": ErrorKind.TYPE_MISMATCH,
    }
    for source, kind in cases.items():
        outcome, _ = run(source)
        assert outcome.error is not None, source
        assert outcome.error.kind is kind, source


@pytest.mark.parametrize("source", ["(-8) ** 0.5", "x = -1\ny = x ** 0.5", "(-2.0) ** -0.5"])
def test_powers_without_a_real_result(source):
    """Test a power with no real result is a type mismatch, not a complex number."""
    outcome, env = run(source)

    assert outcome.error is not None
    assert outcome.error.kind is ErrorKind.TYPE_MISMATCH
    assert "no real result" in outcome.error.message
    assert not any(isinstance(env.lookup(name), complex) for name in env.names())


def test_snapshot_keeps_handles():
    """Test copying an environment duplicates containers but not handles."""
    handle = HostHandle("task root.1", "root.1")
    env = Environment({"h": handle, "batch": [handle, {"n": 1}]})

    copies = env.snapshot()

    assert copies["h"] is handle
    assert copies["batch"] is not env.lookup("batch")
    assert copies["batch"][0] is handle
    copies["batch"][1]["n"] = 2
    assert env.lookup("batch")[1] == {"n": 1}


def test_unknown_method_lists_available_methods():
    """Test the error for an unknown method names the ones that exist."""
    outcome, _ = run("'abc'.foo()")

    assert "available methods" in outcome.error.message
    assert "split" in outcome.error.message


def test_number_semantics():
    """Test exact integers, true division and half-away-from-zero rounding."""
    outcome, _ = run("(2 ** 100, 7 / 2, 7 // 2, round(2.5), round(-2.5), round(0.125, 2))")

    assert outcome.result == (2**100, 3.5, 3, 3, -3, 0.13)


def test_string_and_list_methods():
    """Test the string and list methods used by reasoning code."""
    source = """
text = "East Beach, Crissy Field Beach"
items = [s.strip() for s in text.split(",")]
items.append("Marina Green Courts")
joined = " | ".join(items)
(items, joined.lower().startswith("east"), joined.count("Beach"), "a-b".replace("-", "+"))
"""
    outcome, _ = run(source)

    assert outcome.result == (
        ["East Beach", "Crissy Field Beach", "Marina Green Courts"],
        True,
        2,
        "a+b",
    )


def test_map_methods_and_insertion_order():
    """Test maps keep insertion order through zip, dict and items."""
    outcome, _ = run(
        "tb = dict(zip(courts, counts))\n[k + '=' + str(v) for k, v in tb.items()]",
        courts=["b", "a", "c"],
        counts=[1, 2, 3],
    )

    assert outcome.result == ["b=1", "a=2", "c=3"]


def test_interpolated_strings():
    """Test f-strings with conversions and format specs."""
    outcome, _ = run('f"{city!r} has {n:03d} courts, {ratio:.2f}"', city="SF", n=4, ratio=0.25)

    assert outcome.result == "'SF' has 004 courts, 0.25"


def test_for_loops_and_conditionals():
    """Test loops with tuple unpacking and if/elif/else."""
    source = """
total = 0
labels = []
for i, value in enumerate([5, 12, 7]):
    total += value
    if value > 10:
        labels.append("big")
    elif value > 6:
        labels.append("mid")
    else:
        labels.append("small")
(total, labels)
"""
    outcome, _ = run(source)

    assert outcome.result == (24, ["small", "big", "mid"])


def test_slices_and_negative_indexes():
    """Test slicing with steps and negative indexes."""
    outcome, _ = run("(xs[:2], xs[-1], xs[::2], 'abcdef'[1:4])", xs=[1, 2, 3, 4, 5])

    assert outcome.result == ([1, 2], 5, [1, 3, 5], "bcd")


def test_print_collects_entries():
    """Test print output is recorded in order."""
    outcome, _ = run("print('a')\nprint(1, 2, sep='-')\nprint(['x'])")

    assert outcome.printed == ["a", "1-2", "['x']"]
    assert outcome.result is None


def test_final_answer_stops_execution():
    """Test FinalAnswer ends the block and later statements never run."""
    outcome, env = run("x = 1\nFinalAnswer(['Bobbie Luu'])\nx = 2")

    assert outcome.terminal is not None
    assert outcome.terminal.value == ["Bobbie Luu"]
    assert outcome.error is None
    assert env.lookup("x") == 1


def test_step_budget():
    """Test a long loop under a small step budget ends in budget-exceeded."""
    env = Environment()
    outcome = evaluate_source(
        "for i in range(1000000):\n    x = i", env, limits=EvalLimits(max_steps=1000)
    )

    assert outcome.error is not None
    assert outcome.error.kind is ErrorKind.BUDGET_EXCEEDED
    assert outcome.steps <= 1001


def test_host_functions_are_called_in_source_order():
    """Test host calls happen in order and are counted."""
    calls = []
    host = HostFunction(name="note", fn=lambda text: calls.append(text) or len(text), effect=Effect.TOOL_CALL)
    hosts = HostRegistry([host])
    outcome = evaluate_source("a = note('one')\nb = note('three')\na + b", Environment(), hosts)

    assert calls == ["one", "three"]
    assert outcome.result == 8
    assert hosts.call_counts == {"note": 2}


def test_host_failure_becomes_an_error_record():
    """Test an exception inside a host function is reported as host-failure."""

    def boom():
        raise RuntimeError("backend unavailable")

    hosts = HostRegistry([HostFunction(name="boom", fn=boom)])
    outcome = evaluate_source("boom()", Environment(), hosts)

    assert outcome.error.kind is ErrorKind.HOST_FAILURE
    assert "backend unavailable" in outcome.error.message


def test_host_arity_is_checked():
    """Test positional and keyword arity violations are type mismatches."""
    hosts = HostRegistry([HostFunction(name="one", fn=lambda x: x, min_args=1, max_args=1, keywords=False)])

    assert evaluate_source("one()", Environment(), hosts).error.kind is ErrorKind.TYPE_MISMATCH
    assert evaluate_source("one(1, 2)", Environment(), hosts).error.kind is ErrorKind.TYPE_MISMATCH
    assert evaluate_source("one(1, k=2)", Environment(), hosts).error.kind is ErrorKind.TYPE_MISMATCH


def test_registry_rules():
    """Test names are unique and FinalAnswer is the only terminal host."""
    registry = HostRegistry([final_answer_host()])

    with pytest.raises(ValueError):
        registry.register(final_answer_host())
    with pytest.raises(ValueError):
        registry.register(HostFunction(name="Stop", fn=lambda: None, effect=Effect.TERMINAL))


def test_empty_registry_performs_no_host_calls():
    """Test evaluation without hosts leaves the registry untouched."""
    hosts = HostRegistry()
    outcome = evaluate_source("x = [i * i for i in range(5)]\nsum(x)", Environment(), hosts)

    assert outcome.result == 30
    assert hosts.call_counts == {}


def test_described_values_render():
    """Test described values show their description."""
    value = DescribedValue([1, 2], "list of counts")

    assert "list of counts" in repr(value)


def test_outcome_cannot_be_terminal_and_failed():
    """Test the outcome model rejects both terminal and error."""
    from deepqna.lang import ErrorRecord, TerminalPayload

    with pytest.raises(ValueError):
        EvalOutcome(
            terminal=TerminalPayload(value=1),
            error=ErrorRecord(kind=ErrorKind.SYNTAX, message="x"),
        )


def test_render_observation():
    """Test observation rendering of printed output, results and errors."""
    assert render_observation(EvalOutcome(printed=["3"]), 1000) == "3"
    assert render_observation(EvalOutcome(), 1000) == NO_OUTPUT

    outcome, _ = run("print('before')\ny[10]", y=[1, 2, 3])
    text = render_observation(outcome, 1000)
    assert text.startswith("before\nError(index-out-of-range): ")
    assert " @ 2:" in text


def test_render_observation_truncates_long_output():
    """Test long output is cut to the budget and ends in the elision marker."""
    outcome = EvalOutcome(printed=["x" * 10_000])
    text = render_observation(outcome, 500)

    assert len(text) == 500
    assert text.startswith("xxx")
    assert text.endswith("characters omitted]")
    omitted = int(text.rsplit("[... ", 1)[1].split()[0])
    assert omitted == 10_000 - text.index("\n[... ")


def test_render_observation_prefers_line_boundaries():
    """Test truncation cuts at a line break in the second half of the kept text."""
    outcome = EvalOutcome(printed=["line %03d" % i for i in range(200)])
    text = render_observation(outcome, 300)

    assert len(text) <= 300
    kept = text.split("\n[... ")[0]
    assert kept.split("\n")[-1].startswith("line ")
    assert len(kept.split("\n")[-1]) == len("line 000")


def test_render_observation_budget_floor():
    """Test budgets under 64 characters are rejected."""
    with pytest.raises(ValueError):
        render_observation(EvalOutcome(printed=["3"]), 10)


def test_golden_blocks_match_their_observations():
    """Test the worked decomposition blocks reproduce their observations."""
    formal_scores = ["3-2", "3-0", "3-1", "3-2", "2-3"]
    outcome, _ = run("print(scores[:5])", scores=formal_scores)
    assert render_observation(outcome) == "['3-2', '3-0', '3-1', '3-2', '2-3']"

    outcome, _ = run("count = sum(1 for s in scores if s in ('3-2', '2-3'))\nprint(count)", scores=formal_scores)
    assert render_observation(outcome) == "3"

    outcome, _ = run(
        "tiebreaks = dict(zip(courts, tiebreak_counts))\nprint(tiebreaks)",
        courts=["East Beach", "Crissy Field Beach", "Marina Green Courts", "South End Zone Courts"],
        tiebreak_counts=[14, 8, 5, 11],
    )
    assert render_observation(outcome) == (
        "{'East Beach': 14, 'Crissy Field Beach': 8, 'Marina Green Courts': 5, 'South End Zone Courts': 11}"
    )

    outcome, _ = run(
        'scores = [s.strip() for s in scores.split(",")]\nprint(scores)',
        scores="3-2, 3-0, 3-1, 3-2, 3-1, 2-3, 3-0, 3-2",
    )
    assert render_observation(outcome) == "['3-2', '3-0', '3-1', '3-2', '3-1', '2-3', '3-0', '3-2']"

    outcome, _ = run(
        'print(f"Total rolls: {total_rolls}, Total fours: {total_fours}, Percentage: {percentage}%")',
        total_rolls=1188,
        total_fours=26,
        percentage=round(100 * 26 / 1188),
    )
    assert render_observation(outcome) == "Total rolls: 1188, Total fours: 26, Percentage: 2%"


def test_evaluation_is_deterministic():
    """Test identical inputs render byte-identical observations."""
    source = "xs = sorted(d, key=d.get)\nprint(xs)\n[(k, d[k] * 2) for k in xs]"
    first, _ = run(source, d={"b": 2, "a": 1, "c": 3})
    second, _ = run(source, d={"b": 2, "a": 1, "c": 3})

    assert render_observation(first) == render_observation(second)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abcdefgh"), st.integers(-1000, 1000)), min_size=1, max_size=12))
def test_bindings_persist_across_blocks(assignments):
    """Test every name assigned in one block is visible in the next."""
    env = Environment()
    for name, value in assignments:
        assert evaluate_source(f"{name} = {value}", env).error is None

    expected = dict(assignments)
    for name, value in expected.items():
        outcome = evaluate_source(name, env)
        assert outcome.result == value


@settings(max_examples=50, deadline=None)
@given(st.text(min_size=1, max_size=3000), st.integers(64, 2000))
def test_truncation_respects_the_budget(text, budget):
    """Test rendered observations never exceed their budget."""
    rendered = render_observation(EvalOutcome(printed=[text]), budget)

    assert len(rendered) <= budget
    if len(text) <= budget:
        assert rendered == text


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-50, 50), max_size=20))
def test_aggregates_match_python(values):
    """Test sum, sorted and len agree with Python on integer lists."""
    outcome = evaluate(parse("(sum(xs), sorted(xs), len(xs))"), Environment({"xs": values}))

    assert outcome.result == (sum(values), sorted(values), len(values))
