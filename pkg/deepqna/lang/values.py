"""Runtime values of the formal language.

Values are plain Python objects (None, bool, int, float, str, list, tuple,
dict) plus the opaque and callable wrappers defined here.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterator

_TYPE_NAMES = (
    (bool, "boolean"),
    (int, "integer"),
    (float, "float"),
    (str, "string"),
    (list, "list"),
    (tuple, "tuple"),
    (dict, "map"),
    (range, "range"),
)


class HostHandle:
    """Opaque reference returned by a host function.

    Handles compare by identity only, and copying one yields the same handle.
    """

    __slots__ = ("label", "payload")

    def __init__(self, label: str, payload: Any = None):
        self.label = label
        self.payload = payload

    def __copy__(self) -> "HostHandle":
        return self

    def __deepcopy__(self, memo: Dict[int, Any]) -> "HostHandle":
        return self

    def __repr__(self) -> str:
        return f"<handle {self.label}>"


@dataclass(frozen=True, eq=False)
class DescribedValue:
    """A value paired with a description, as produced by `Var(value, description)`."""

    value: Any
    description: str

    def __repr__(self) -> str:
        return f"Var({self.value!r}, {self.description!r})"


@dataclass(frozen=True, eq=False)
class Builtin:
    """A builtin function. `fn` receives (machine, span, args, kwargs)."""

    name: str
    fn: Callable[..., Any]

    def __repr__(self) -> str:
        return f"<builtin {self.name}>"


@dataclass(frozen=True, eq=False)
class BoundMethod:
    """A method looked up on a receiver. `fn` receives (machine, span, receiver, args, kwargs)."""

    receiver: Any
    name: str
    fn: Callable[..., Any]

    def __repr__(self) -> str:
        return f"<method {type_name(self.receiver)}.{self.name}>"


class LazyGenerator:
    """Single-pass sequence produced by a generator expression."""

    def __init__(self, iterator: Iterator[Any]):
        self._iterator = iterator

    def __iter__(self) -> "LazyGenerator":
        return self

    def __next__(self) -> Any:
        return next(self._iterator)

    def __repr__(self) -> str:
        return "<generator>"


def type_name(value: Any) -> str:
    """Name of a value's type as shown in error messages."""
    if value is None:
        return "null"
    for python_type, name in _TYPE_NAMES:
        if isinstance(value, python_type):
            return name
    if isinstance(value, HostHandle):
        return "host-handle"
    if isinstance(value, LazyGenerator):
        return "generator"
    if isinstance(value, DescribedValue):
        return "described-value"
    if callable(value):
        return "function"
    return type(value).__name__


def _plural(name: str, count: int) -> str:
    return name if count == 1 else f"{name}s"


def type_summary(value: Any) -> str:
    """Short human-readable description of a value's shape, e.g. "list of 4 strings"."""
    if isinstance(value, str):
        return f"string of {len(value)} {_plural('character', len(value))}"
    if isinstance(value, (list, tuple)):
        kind = type_name(value)
        element_types = {type_name(item) for item in value}
        if len(element_types) == 1:
            element = element_types.pop()
            return f"{kind} of {len(value)} {_plural(element, len(value))}"
        return f"{kind} of {len(value)} {_plural('item', len(value))}"
    if isinstance(value, dict):
        return f"map with {len(value)} {_plural('key', len(value))}"
    return type_name(value)


def render_value(value: Any) -> str:
    """Render a value the way an interactive session echoes a result."""
    return repr(value)
