"""System prompt rendering for reasoning threads."""

from typing import List, NamedTuple, Sequence

from deepqna.config import prompts
from deepqna.lang.hosts import HostFunction
from deepqna.lang.source import CODE_CLOSE, CODE_OPEN, OBSERVATION_PREFIX
from deepqna.models.decomposition import DecompositionExample
from deepqna.models.task import PromptMode


class VariableDoc(NamedTuple):
    """Documentation of one pre-seeded variable."""

    name: str
    description: str
    type_summary: str


def render_example(example: DecompositionExample) -> str:
    """Render one example as task line plus alternating thought, code and observation blocks."""
    lines = [prompts.NAMESPACE_LINE.format(namespace=example.namespace)]
    lines.append(prompts.TASK_LINE.format(task=example.task))
    for turn in example.turns:
        if turn.thought:
            lines.append(turn.thought)
        lines.append(CODE_OPEN)
        lines.append(turn.code.text.rstrip("\n"))
        lines.append(CODE_CLOSE)
        if turn.observation is not None:
            lines.append(OBSERVATION_PREFIX)
            lines.append(turn.observation)
    return "\n".join(lines)


def render_variables(variables: Sequence[VariableDoc]) -> List[str]:
    lines = []
    for var in variables:
        lines.append(prompts.VARIABLE_LINE.format(name=var.name, description=var.description or "(no description)"))
        lines.append(prompts.VARIABLE_TYPE_LINE.format(summary=var.type_summary))
    return lines


def render_system_prompt(
    examples: Sequence[DecompositionExample],
    hosts: Sequence[HostFunction],
    variables: Sequence[VariableDoc] = (),
    mode: PromptMode = PromptMode.EXAMPLES,
    preamble: str = prompts.PREAMBLE,
) -> str:
    """
    Assemble a thread's system prompt.

    Sections appear in a fixed order: preamble, host functions, variables, then
    the examples, nothing, or the principles text depending on the mode.

    Args:
        examples: Selected examples, rendered only in examples mode
        hosts: Host functions to document
        variables: Pre-seeded variables to document
        mode: Prompt mode
        preamble: Role preamble

    Returns:
        The prompt text; identical inputs give identical text
    """
    sections = [preamble.strip()]

    host_lines = [prompts.SECTION_FUNCTIONS]
    host_lines.extend(f"- {host.describe()}" for host in hosts)
    sections.append("\n".join(host_lines))

    if variables:
        sections.append("\n".join([prompts.SECTION_VARIABLES, *render_variables(variables)]))

    if mode is PromptMode.EXAMPLES and examples:
        rendered = [prompts.SECTION_EXAMPLES]
        rendered.extend(render_example(example) for example in examples)
        sections.append("\n\n".join(rendered))
    elif mode is PromptMode.PRINCIPLES:
        sections.append("\n".join([prompts.SECTION_PRINCIPLES, prompts.PRINCIPLES]))

    return "\n\n".join(sections) + "\n"
