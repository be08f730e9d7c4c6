"""Variable scopes for the formal language."""

import copy
from typing import Any, Dict, Iterator, List, Optional

_MISSING = object()


class Environment:
    """A scope of name bindings with an optional enclosing scope.

    Lookups walk child to parent; assignment always binds in this scope.
    One environment belongs to one reasoning thread and persists across the
    code blocks that thread evaluates.
    """

    def __init__(
        self, bindings: Optional[Dict[str, Any]] = None, parent: Optional["Environment"] = None
    ):
        self.bindings: Dict[str, Any] = dict(bindings or {})
        self.parent = parent

    def lookup(self, name: str, default: Any = _MISSING) -> Any:
        """Resolve a name.

        Args:
            name: Identifier to resolve
            default: Value returned when the name is unbound

        Returns:
            The bound value

        Raises:
            KeyError: If the name is unbound and no default is given
        """
        scope: Optional[Environment] = self
        while scope is not None:
            if name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        if default is _MISSING:
            raise KeyError(name)
        return default

    def assign(self, name: str, value: Any) -> None:
        self.bindings[name] = value

    def child(self) -> "Environment":
        return Environment(parent=self)

    def __contains__(self, name: object) -> bool:
        scope: Optional[Environment] = self
        while scope is not None:
            if name in scope.bindings:
                return True
            scope = scope.parent
        return False

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def names(self) -> List[str]:
        """All visible names, innermost scope first."""
        seen: Dict[str, None] = {}
        scope: Optional[Environment] = self
        while scope is not None:
            for name in scope.bindings:
                seen.setdefault(name, None)
            scope = scope.parent
        return list(seen)

    def snapshot(self) -> Dict[str, Any]:
        """Deep copy of every visible binding."""
        return {name: _copy(self.lookup(name)) for name in self.names()}


def _copy(value: Any) -> Any:
    try:
        return copy.deepcopy(value)
    except TypeError:
        # generators cannot be copied
        return value
