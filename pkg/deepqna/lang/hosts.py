"""Host functions: the only way formal code reaches the outside world."""

import threading
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Collection, Dict, Iterable, Iterator, List, Mapping, Optional, Union

FINAL_ANSWER = "FinalAnswer"


class Effect(str, Enum):
    """Effect class of a host function."""

    PURE = "pure"
    ASSOCIATIVE_CALL = "associative-call"
    RECURSIVE_CALL = "recursive-call"
    TOOL_CALL = "tool-call"
    TERMINAL = "terminal"


@dataclass(frozen=True, eq=False)
class HostFunction:
    """A function the embedding program exposes to formal code.

    `max_args` of None means variadic. `keywords` is True when any keyword
    argument is accepted, otherwise the set of accepted names.
    `members` exposes attribute-style access such as `DoLoReS.run_all`.
    """

    name: str
    fn: Callable[..., Any]
    effect: Effect = Effect.PURE
    signature: str = ""
    doc: str = ""
    min_args: int = 0
    max_args: Optional[int] = None
    keywords: Union[bool, Collection[str]] = True
    blocking: bool = False
    members: Mapping[str, "HostFunction"] = field(default_factory=dict)
    documented: bool = True

    def check_arguments(self, positional: int, keyword_names: Iterable[str]) -> Optional[str]:
        """Check an argument list against the arity spec.

        Returns:
            A problem description, or None when the arguments are acceptable
        """
        if positional < self.min_args:
            return f"{self.name}() takes at least {self.min_args} positional argument(s), got {positional}"
        if self.max_args is not None and positional > self.max_args:
            return f"{self.name}() takes at most {self.max_args} positional argument(s), got {positional}"
        names = list(keyword_names)
        if self.keywords is True:
            return None
        if self.keywords is False:
            if names:
                return f"{self.name}() takes no keyword arguments"
            return None
        unexpected = [n for n in names if n not in self.keywords]
        if unexpected:
            return f"{self.name}() got an unexpected keyword argument '{unexpected[0]}'"
        return None

    def describe(self) -> str:
        """One documentation line for the system prompt."""
        signature = self.signature or f"{self.name}(...)"
        return f"{signature}: {self.doc}" if self.doc else signature

    def __repr__(self) -> str:
        return f"<host {self.name}>"


def final_answer_host() -> HostFunction:
    """The terminal host: its argument becomes the thread's answer."""
    return HostFunction(
        name=FINAL_ANSWER,
        fn=lambda value: value,
        effect=Effect.TERMINAL,
        signature="FinalAnswer(value)",
        doc="Finish the task and return `value` as the answer. Nothing after this call runs.",
        min_args=1,
        max_args=1,
        keywords=frozenset(),
    )


class HostRegistry:
    """Name-unique set of host functions, with per-name invocation counts."""

    def __init__(self, functions: Iterable[HostFunction] = ()):
        self._functions: Dict[str, HostFunction] = {}
        self._calls: Counter = Counter()
        self._lock = threading.Lock()
        for function in functions:
            self.register(function)

    def register(self, function: HostFunction) -> None:
        """Add a host function.

        Raises:
            ValueError: If the name is taken, or a terminal function is not FinalAnswer
        """
        if function.name in self._functions:
            raise ValueError(f"Host function already registered: {function.name}")
        if function.effect is Effect.TERMINAL and function.name != FINAL_ANSWER:
            raise ValueError(f"Only {FINAL_ANSWER} may be a terminal host function, not {function.name}")
        self._functions[function.name] = function

    def get(self, name: str) -> Optional[HostFunction]:
        return self._functions.get(name)

    def record_call(self, name: str) -> None:
        with self._lock:
            self._calls[name] += 1

    @property
    def call_counts(self) -> Dict[str, int]:
        with self._lock:
            return dict(self._calls)

    def documented(self) -> List[HostFunction]:
        """Host functions to describe in a system prompt, in registration order."""
        return [f for f in self._functions.values() if f.documented]

    def extended(self, functions: Iterable[HostFunction]) -> "HostRegistry":
        """A new registry holding these functions plus the given ones."""
        return HostRegistry([*self._functions.values(), *functions])

    def __contains__(self, name: object) -> bool:
        return name in self._functions

    def __iter__(self) -> Iterator[HostFunction]:
        return iter(list(self._functions.values()))

    def __len__(self) -> int:
        return len(self._functions)
