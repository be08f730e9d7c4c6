"""Deterministic scripted backend.

Mock scripts (extension `.mock`) are ordered rules:

    # comment
    [RULE thread="root" turn=1 channel=model contains="volleyball"]
    ...response text...
    [/RULE]

`thread` is a glob pattern over thread ids (default `*`), `turn` the 1-based
index of the request among those from the same thread on the same channel
(default: any), `channel` is `model` or `llm` (default: any), and `contains`
a substring of the last user message (default: any). The first matching rule
fires.
"""

import fnmatch
import logging
import re
import threading
from collections import defaultdict
from importlib import resources
from pathlib import Path
from typing import DefaultDict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from deepqna.llm.base import Backend
from deepqna.llm.errors import MockMiss
from deepqna.llm.tokens import approximate_tokens, delimited_tokens, truncate_tokens
from deepqna.models.messages import Channel, CompletionRequest, CompletionResult, FinishReason, Usage

logger = logging.getLogger(__name__)

MOCK_EXTENSION = ".mock"

_OPEN = re.compile(r"^\[RULE((?:\s+[^\]]*)?)\]\s*$")
_CLOSE = re.compile(r"^\[/RULE\]\s*$")
_ATTRIBUTE = re.compile(r'(\w+)=(?:"((?:[^"\\]|\\.)*)"|(\S+))')
_KNOWN = {"thread", "turn", "channel", "contains"}


class MockScriptError(ValueError):
    """A mock script violates the rule format."""

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class Rule(BaseModel):
    """One scripted response and the requests it answers."""

    model_config = ConfigDict(frozen=True)

    thread: str = Field("*", description="Glob pattern over thread ids")
    turn: Optional[int] = Field(None, ge=1, description="1-based request index per thread and channel")
    channel: Optional[Channel] = None
    contains: Optional[str] = Field(None, description="Substring of the last user message")
    response: str = ""
    line: int = 0

    def matches(self, request: CompletionRequest, turn: int) -> bool:
        if not fnmatch.fnmatchcase(request.thread_label, self.thread):
            return False
        if self.turn is not None and self.turn != turn:
            return False
        if self.channel is not None and self.channel is not request.channel:
            return False
        if self.contains is not None and self.contains not in request.last_user_message:
            return False
        return True


class MockScript(BaseModel):
    """Ordered rules."""

    model_config = ConfigDict(frozen=True)

    rules: Tuple[Rule, ...] = ()


def _attributes(text: str, line: int) -> dict:
    values = {}
    for name, quoted, bare in _ATTRIBUTE.findall(text):
        if name not in _KNOWN:
            raise MockScriptError(line, f"unknown rule attribute '{name}'")
        values[name] = quoted.replace('\\"', '"') if quoted or not bare else bare
    return values


def parse_mock_script(document: str) -> MockScript:
    """
    Parse a mock script.

    Args:
        document: Script text

    Returns:
        MockScript: Rules in file order

    Raises:
        MockScriptError: On unbalanced markers, unknown attributes or bad values
    """
    rules: List[Rule] = []
    current: Optional[dict] = None
    body: List[str] = []

    lines = document.splitlines()
    for number, line in enumerate(lines, start=1):
        if current is None:
            opened = _OPEN.match(line)
            if opened:
                current = _attributes(opened.group(1) or "", number)
                current["line"] = number
                body = []
            elif line.strip() and not line.lstrip().startswith("#"):
                raise MockScriptError(number, "text outside a rule")
            continue
        if _CLOSE.match(line):
            current["response"] = "\n".join(body).strip("\n")
            try:
                rules.append(Rule(**current))
            except ValueError as e:
                raise MockScriptError(current["line"], str(e)) from None
            current = None
        elif _OPEN.match(line):
            raise MockScriptError(number, "[RULE] inside another rule")
        else:
            body.append(line)

    if current is not None:
        raise MockScriptError(len(lines), "unterminated rule: missing [/RULE]")
    return MockScript(rules=tuple(rules))


def load_mock_script(path: Union[str, Path]) -> MockScript:
    """Load a mock script file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Mock script not found: {path}")
    return parse_mock_script(path.read_text(encoding="utf-8"))


def load_bundled_script(name: str) -> MockScript:
    """Load a mock script shipped in the package data."""
    return parse_mock_script(resources.files("deepqna.data").joinpath(name).read_text(encoding="utf-8"))


def resolve_mock_script(source: Union[str, Path]) -> MockScript:
    """
    Load a mock script from a file, or by name from the package data.

    Raises:
        FileNotFoundError: If it is neither
    """
    path = Path(source)
    if path.is_file():
        return load_mock_script(path)
    if resources.files("deepqna.data").joinpath(str(source)).is_file():
        return load_bundled_script(str(source))
    raise FileNotFoundError(f"Mock script not found: {source}")


class MockBackend(Backend):
    """Answers requests from a mock script, with word counts as token counts."""

    name = "mock"

    def __init__(self, script: MockScript, reasoning_delimiters: Tuple[str, str] = ("<think>", "</think>")):
        self.script = script
        self.reasoning_delimiters = reasoning_delimiters
        self._turns: DefaultDict[Tuple[str, Channel], int] = defaultdict(int)
        self._lock = threading.Lock()

    def turn_count(self, thread_label: str, channel: Channel = Channel.MODEL) -> int:
        """Requests seen so far from a thread on a channel."""
        with self._lock:
            return self._turns[(thread_label, channel)]

    def complete(self, request: CompletionRequest) -> CompletionResult:
        with self._lock:
            key = (request.thread_label, request.channel)
            self._turns[key] += 1
            turn = self._turns[key]

        rule = next((r for r in self.script.rules if r.matches(request, turn)), None)
        if rule is None:
            raise MockMiss(request.thread_label, turn, request.channel.value)
        logger.debug(f"Mock rule at line {rule.line} answers {request.thread_label} turn {turn}")

        text = rule.response
        finish = FinishReason.STOP
        cut = min((i for i in (text.find(s) for s in request.stop_sequences if s) if i >= 0), default=-1)
        if cut >= 0:
            text = text[:cut]
        text, truncated = truncate_tokens(text, request.max_new_tokens)
        if truncated:
            finish = FinishReason.LENGTH

        completion = approximate_tokens(text)
        usage = Usage(
            prompt_tokens=sum(approximate_tokens(m.content) for m in request.messages),
            completion_tokens=completion,
            reasoning_tokens=min(delimited_tokens(text, self.reasoning_delimiters), completion),
        )
        return CompletionResult(text=text, usage=usage, finish=finish, approximate_usage=True)
