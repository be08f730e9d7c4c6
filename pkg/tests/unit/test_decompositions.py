"""Tests for the decomposition example store and prompt rendering."""

import pytest

from deepqna.config import prompts
from deepqna.decompositions import (
    FormatError,
    VariableDoc,
    load_bundled_library,
    load_library,
    load_library_file,
    render_library,
    render_system_prompt,
    select,
)
from deepqna.lang import CODE_OPEN, final_answer_host
from deepqna.models.task import PromptMode

MINIMAL = """
# comment lines between examples are ignored
[EXAMPLE namespace="formal"]
[TASK]
Add two numbers.
[CODE]
x = 1 + 2
print(x)
[OBSERVATION]
3
[CODE]
FinalAnswer(x)
[/EXAMPLE]
"""


def code_block_count(prompt):
    """Count lines that open a code block."""
    return prompt.splitlines().count(CODE_OPEN)


def test_bundled_library_namespaces():
    """Test the bundled library holds one example per namespace, in file order."""
    library = load_bundled_library()

    assert library.namespaces == ["sequential reasoning", "lookup", "formal"]
    assert [len(select(library, ns)) for ns in library.namespaces] == [1, 1, 1]
    assert [e.code_blocks for e in library.examples] == [4, 3, 3]
    assert library.default_namespace == "sequential reasoning"


def test_load_minimal_library():
    """Test a small library loads with its observation and final turn."""
    library = load_library(MINIMAL)
    example = library.examples[0]

    assert example.namespace == "formal"
    assert example.task == "Add two numbers."
    assert example.turns[0].observation == "3"
    assert example.turns[-1].observation is None
    assert "FinalAnswer" in example.turns[-1].code.text


def test_library_requires_final_answer():
    """Test an example whose last turn lacks FinalAnswer is rejected."""
    document = MINIMAL.replace("FinalAnswer(x)", "print(x)")

    with pytest.raises(FormatError):
        load_library(document)


@pytest.mark.parametrize(
    "document",
    [
        "[EXAMPLE namespace=\"a\"]\n[TASK]\nt\n[CODE]\nFinalAnswer(1)\n",
        "[/EXAMPLE]\n",
        "stray text\n",
        "[EXAMPLE]\n[TASK]\nt\n[CODE]\nFinalAnswer(1)\n[/EXAMPLE]\n",
        "[EXAMPLE namespace=\"a\"]\n[TASK]\nt\n[WHATEVER]\nx\n[/EXAMPLE]\n",
        "[EXAMPLE namespace=\"a\"]\n[CODE]\nFinalAnswer(1)\n[/EXAMPLE]\n",
    ],
)
def test_malformed_libraries(document):
    """Test unbalanced markers, unknown blocks and missing parts raise FormatError."""
    with pytest.raises(FormatError):
        load_library(document)


def test_format_error_reports_line():
    """Test format errors carry the offending line number."""
    with pytest.raises(FormatError) as exc_info:
        load_library("\n\nstray text\n")

    assert exc_info.value.line == 3


def test_select_by_namespace():
    """Test selection returns the namespace's examples in file order."""
    library = load_bundled_library()
    lookup = select(library, "lookup")

    assert len(lookup) == 1
    assert "East Beach" in lookup[0].task


def test_select_falls_back_to_default():
    """Test an unknown namespace selects the default namespace."""
    library = load_bundled_library()

    fallback = select(library, "nonexistent")
    assert [e.namespace for e in fallback] == ["sequential reasoning"]

    custom = load_bundled_library(default_namespace="formal")
    assert [e.namespace for e in select(custom, "nonexistent")] == ["formal"]


def test_select_on_empty_library():
    """Test an empty library selects nothing."""
    assert select(load_library(""), "anything") == []


def test_render_library_round_trip():
    """Test serializing and reloading a library preserves it."""
    library = load_bundled_library()

    assert load_library(render_library(library)) == library


def test_load_library_file(tmp_path):
    """Test loading from disk, and a missing file."""
    path = tmp_path / "small.decomp"
    path.write_text(MINIMAL, encoding="utf-8")

    assert len(load_library_file(path)) == 1
    with pytest.raises(FileNotFoundError):
        load_library_file(tmp_path / "missing.decomp")


def test_system_prompt_with_examples():
    """Test the examples mode renders every task and code block."""
    library = load_bundled_library()
    prompt = render_system_prompt(list(library.examples), [final_answer_host()])

    task_lines = [line for line in prompt.splitlines() if line.startswith("Task: ")]
    assert len(task_lines) == 3
    assert code_block_count(prompt) == 10
    assert prompts.SECTION_EXAMPLES in prompt


def test_system_prompt_modes_are_exclusive():
    """Test the no-examples and principles modes render no example code."""
    library = load_bundled_library()
    examples = list(library.examples)

    bare = render_system_prompt(examples, [final_answer_host()], mode=PromptMode.NO_EXAMPLES)
    assert code_block_count(bare) == 0
    assert prompts.PRINCIPLES not in bare

    principled = render_system_prompt(examples, [final_answer_host()], mode=PromptMode.PRINCIPLES)
    assert code_block_count(principled) == 0
    assert prompts.PRINCIPLES in principled


def test_system_prompt_section_order():
    """Test preamble, functions, variables and examples appear in that order."""
    library = load_bundled_library()
    variables = [VariableDoc("scores", "list of match result strings", "list of 8 str")]
    prompt = render_system_prompt(select(library, "formal"), [final_answer_host()], variables)

    positions = [
        prompt.index(prompts.PREAMBLE.splitlines()[0]),
        prompt.index(prompts.SECTION_FUNCTIONS),
        prompt.index("- FinalAnswer(value)"),
        prompt.index(prompts.SECTION_VARIABLES),
        prompt.index("Variable `scores`: list of match result strings"),
        prompt.index(prompts.SECTION_EXAMPLES),
    ]
    assert positions == sorted(positions)


def test_system_prompt_is_deterministic():
    """Test identical inputs render identical prompts."""
    library = load_bundled_library()
    first = render_system_prompt(list(library.examples), [final_answer_host()])
    second = render_system_prompt(list(library.examples), [final_answer_host()])

    assert first == second
