"""Loading, validating, serializing and selecting decomposition examples.

Library files (extension `.decomp`) use explicit block markers:

    [EXAMPLE namespace="lookup"]
    [TASK]
    ...task text...
    [THOUGHT]
    ...optional reasoning...
    [CODE]
    ...code...
    [OBSERVATION]
    ...what the code printed...
    [/EXAMPLE]

Lines starting with `#` outside an example are comments.
"""

import logging
import re
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from deepqna.lang.source import SourceBlock, SourceOrigin
from deepqna.models.decomposition import DecompositionExample, ExampleLibrary, Turn

logger = logging.getLogger(__name__)

LIBRARY_EXTENSION = ".decomp"
BUNDLED_LIBRARY = "volleyball.decomp"

_MARKER = re.compile(r"^\[(/?[A-Z][A-Z_]*)((?:\s+[^\]]*)?)\]\s*$")
_ATTRIBUTE = re.compile(r'(\w+)="((?:[^"\\]|\\.)*)"')
_BLOCK_KINDS = ("TASK", "THOUGHT", "CODE", "OBSERVATION")


class FormatError(ValueError):
    """A library document violates the file format or an example invariant."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class _ExampleBuilder:
    """Accumulates the blocks of one example."""

    def __init__(self, namespace: str, line: int):
        self.namespace = namespace
        self.line = line
        self.task: Optional[str] = None
        self.turns: List[Dict[str, Optional[str]]] = []
        self.pending_thought: Optional[str] = None

    def add(self, kind: str, content: str, line: int) -> None:
        if kind == "TASK":
            if self.task is not None:
                raise FormatError(line, "example has more than one [TASK] block")
            self.task = content
            return
        if self.task is None:
            raise FormatError(line, f"[{kind}] before [TASK]")
        if kind == "THOUGHT":
            if self.pending_thought is not None:
                raise FormatError(line, "two [THOUGHT] blocks without a [CODE] block between them")
            self.pending_thought = content
        elif kind == "CODE":
            self.turns.append({"thought": self.pending_thought or "", "code": content, "observation": None})
            self.pending_thought = None
        elif kind == "OBSERVATION":
            if not self.turns or self.pending_thought is not None:
                raise FormatError(line, "[OBSERVATION] must follow a [CODE] block")
            if self.turns[-1]["observation"] is not None:
                raise FormatError(line, "turn has more than one [OBSERVATION] block")
            self.turns[-1]["observation"] = content

    def build(self, end_line: int) -> DecompositionExample:
        if self.task is None or not self.task.strip():
            raise FormatError(self.line, "example is missing its task")
        if self.pending_thought is not None:
            raise FormatError(end_line, "[THOUGHT] without a following [CODE] block")
        if not self.turns:
            raise FormatError(self.line, "example has no turns")
        if "FinalAnswer(" not in (self.turns[-1]["code"] or ""):
            raise FormatError(end_line, "final turn does not call FinalAnswer")
        try:
            turns = tuple(
                Turn(
                    thought=t["thought"] or "",
                    code=SourceBlock(text=t["code"] or "", origin=SourceOrigin.EXAMPLE),
                    observation=t["observation"],
                )
                for t in self.turns
            )
            return DecompositionExample(namespace=self.namespace, task=self.task, turns=turns)
        except ValidationError as e:
            reason = "; ".join(err["msg"] for err in e.errors())
            raise FormatError(self.line, reason) from None


def _content(lines: List[str]) -> str:
    return "\n".join(lines).strip("\n")


def load_library(document: str, default_namespace: Optional[str] = None) -> ExampleLibrary:
    """
    Parse and validate a library document.

    Args:
        document: Library text
        default_namespace: Selection fallback; the first namespace in the file when None

    Returns:
        ExampleLibrary: Examples in file order

    Raises:
        FormatError: On unbalanced or unknown markers, a missing task, or an invalid example
    """
    examples: List[DecompositionExample] = []
    builder: Optional[_ExampleBuilder] = None
    block: Optional[Tuple[str, int]] = None
    buffer: List[str] = []

    def flush() -> None:
        nonlocal block, buffer
        if block is not None and builder is not None:
            builder.add(block[0], _content(buffer), block[1])
        block, buffer = None, []

    lines = document.splitlines()
    for number, line in enumerate(lines, start=1):
        match = _MARKER.match(line)
        if match is None:
            if builder is None:
                if line.strip() and not line.lstrip().startswith("#"):
                    raise FormatError(number, "text outside an example")
            elif block is None:
                if line.strip():
                    raise FormatError(number, "text outside a block")
            else:
                buffer.append(line)
            continue

        kind, attributes = match.group(1), match.group(2)
        if kind == "EXAMPLE":
            if builder is not None:
                raise FormatError(number, "[EXAMPLE] inside another example")
            attrs = dict(_ATTRIBUTE.findall(attributes or ""))
            namespace = attrs.get("namespace", "").replace('\\"', '"')
            if not namespace.strip():
                raise FormatError(number, "example is missing its namespace")
            builder = _ExampleBuilder(namespace, number)
        elif kind == "/EXAMPLE":
            if builder is None:
                raise FormatError(number, "[/EXAMPLE] without a matching [EXAMPLE]")
            flush()
            examples.append(builder.build(number))
            builder = None
        elif kind in _BLOCK_KINDS:
            if builder is None:
                raise FormatError(number, f"[{kind}] outside an example")
            flush()
            block = (kind, number)
        else:
            raise FormatError(number, f"unknown block kind [{kind}]")

    if builder is not None:
        raise FormatError(len(lines), "unterminated example: missing [/EXAMPLE]")

    default = default_namespace or (examples[0].namespace if examples else None)
    logger.debug(f"Loaded {len(examples)} decomposition examples")
    return ExampleLibrary(examples=tuple(examples), default_namespace=default)


def load_library_file(path: Union[str, Path], default_namespace: Optional[str] = None) -> ExampleLibrary:
    """Load a library from a file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Example library not found: {path}")
    return load_library(path.read_text(encoding="utf-8"), default_namespace)


def load_bundled_library(name: str = BUNDLED_LIBRARY, default_namespace: Optional[str] = None) -> ExampleLibrary:
    """Load a library shipped in the package data."""
    text = resources.files("deepqna.data").joinpath(name).read_text(encoding="utf-8")
    return load_library(text, default_namespace)


def render_library(library: ExampleLibrary) -> str:
    """Serialize a library back to the file format."""
    out: List[str] = []
    for example in library.examples:
        namespace = example.namespace.replace('"', '\\"')
        out.append(f'[EXAMPLE namespace="{namespace}"]')
        out.append("[TASK]")
        out.append(example.task)
        for turn in example.turns:
            if turn.thought:
                out.append("[THOUGHT]")
                out.append(turn.thought)
            out.append("[CODE]")
            out.append(turn.code.text)
            if turn.observation is not None:
                out.append("[OBSERVATION]")
                if turn.observation:
                    out.append(turn.observation)
        out.append("[/EXAMPLE]")
        out.append("")
    return "\n".join(out)


def select(library: ExampleLibrary, namespace: str) -> List[DecompositionExample]:
    """
    Examples for a namespace, falling back to the default namespace.

    Args:
        library: Example library
        namespace: Requested namespace

    Returns:
        Matching examples in file order; possibly empty
    """
    index = library.index
    positions = index.get(namespace)
    if not positions:
        default = library.default_namespace
        if default is None and library.examples:
            default = library.examples[0].namespace
        positions = index.get(default, []) if default is not None else []
    return [library.examples[i] for i in positions]
