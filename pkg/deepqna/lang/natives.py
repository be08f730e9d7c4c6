"""Builtin functions and methods on strings, lists and maps."""

import math
from decimal import ROUND_HALF_UP, Decimal, localcontext
from typing import Any, Callable, Dict, Iterator, List, Optional, Protocol

from deepqna.lang.errors import ErrorKind, EvalError, Span
from deepqna.lang.values import BoundMethod, Builtin, type_name

_MISSING = object()


class Machine(Protocol):
    """What builtins need from the evaluator."""

    def tick(self, span: Span) -> None: ...

    def iterate(self, value: Any, span: Span) -> Iterator[Any]: ...

    def call(self, func: Any, args: List[Any], kwargs: Dict[str, Any], span: Span) -> Any: ...

    def emit(self, text: str) -> None: ...


def _mismatch(message: str, span: Span) -> EvalError:
    return EvalError(ErrorKind.TYPE_MISMATCH, message, span)


def _check(name: str, args: List[Any], kwargs: Dict[str, Any], span: Span,
           min_args: int, max_args: Optional[int], keywords: tuple = ()) -> None:
    if len(args) < min_args:
        raise _mismatch(f"{name}() takes at least {min_args} argument(s), got {len(args)}", span)
    if max_args is not None and len(args) > max_args:
        raise _mismatch(f"{name}() takes at most {max_args} argument(s), got {len(args)}", span)
    for key in kwargs:
        if key not in keywords:
            raise _mismatch(f"{name}() got an unexpected keyword argument '{key}'", span)


def _print(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> None:
    _check("print", args, kwargs, span, 0, None, ("sep", "end"))
    sep = kwargs.get("sep", " ")
    end = kwargs.get("end", "\n")
    if not isinstance(sep, str) or not isinstance(end, str):
        raise _mismatch("print() sep and end must be strings", span)
    text = sep.join(str(a) for a in args)
    m.emit(text if end == "\n" else text + end)


def _len(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> int:
    _check("len", args, kwargs, span, 1, 1)
    value = args[0]
    if not isinstance(value, (str, list, tuple, dict, range)):
        raise _mismatch(f"object of type '{type_name(value)}' has no len()", span)
    return len(value)


def _sum(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> Any:
    _check("sum", args, kwargs, span, 1, 2, ("start",))
    total = args[1] if len(args) > 1 else kwargs.get("start", 0)
    if isinstance(total, str):
        raise _mismatch("sum() can't sum strings, use ''.join(seq) instead", span)
    for item in m.iterate(args[0], span):
        try:
            total = total + item
        except TypeError:
            raise _mismatch(
                f"unsupported operand types for +: '{type_name(total)}' and '{type_name(item)}'", span
            ) from None
    return total


def _extreme(name: str, better: Callable[[Any, Any], bool]):
    def extreme(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> Any:
        _check(name, args, kwargs, span, 1, None, ("key", "default"))
        key = kwargs.get("key")
        default = kwargs.get("default", _MISSING)
        if len(args) == 1:
            items = m.iterate(args[0], span)
        else:
            if default is not _MISSING:
                raise _mismatch(f"Cannot specify a default for {name}() with multiple positional arguments", span)
            items = iter(args)
        best = best_key = _MISSING
        for item in items:
            item_key = item if key is None else m.call(key, [item], {}, span)
            if best is _MISSING:
                best, best_key = item, item_key
                continue
            try:
                # strict comparison keeps the first occurrence on ties
                if better(item_key, best_key):
                    best, best_key = item, item_key
            except TypeError:
                raise _mismatch(
                    f"'{type_name(item_key)}' and '{type_name(best_key)}' cannot be compared", span
                ) from None
        if best is _MISSING:
            if default is not _MISSING:
                return default
            raise _mismatch(f"{name}() arg is an empty sequence", span)
        return best

    return extreme


def _sorted(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> List[Any]:
    _check("sorted", args, kwargs, span, 1, 1, ("key", "reverse"))
    items = list(m.iterate(args[0], span))
    key = kwargs.get("key")
    keys = items if key is None else [m.call(key, [item], {}, span) for item in items]
    try:
        order = sorted(range(len(items)), key=keys.__getitem__, reverse=bool(kwargs.get("reverse", False)))
    except TypeError:
        raise _mismatch("sorted() got values that cannot be compared", span) from None
    return [items[i] for i in order]


def round_half_away(value: Any, ndigits: Optional[int] = None) -> Any:
    """Round with ties going away from zero.

    Args:
        value: Integer or float to round
        ndigits: Decimal places; None returns an integer

    Returns:
        The rounded number
    """
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"type '{type_name(value)}' doesn't define __round__")
    if ndigits is not None and (isinstance(ndigits, bool) or not isinstance(ndigits, int)):
        raise TypeError("round() ndigits must be an integer")
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        if ndigits is None:
            raise ValueError(f"cannot convert float {value} to integer")
        return value
    with localcontext() as ctx:
        ctx.prec = max(28, len(str(value)) + abs(ndigits or 0) + 2)
        quantum = Decimal(1).scaleb(-(ndigits or 0))
        rounded = Decimal(str(value)).quantize(quantum, rounding=ROUND_HALF_UP)
    if ndigits is None or isinstance(value, int):
        return int(rounded)
    return float(rounded)


def _round(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> Any:
    _check("round", args, kwargs, span, 1, 2, ("ndigits",))
    ndigits = args[1] if len(args) > 1 else kwargs.get("ndigits")
    return round_half_away(args[0], ndigits)


def _range(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> range:
    _check("range", args, kwargs, span, 1, 3)
    for arg in args:
        if isinstance(arg, bool) or not isinstance(arg, int):
            raise _mismatch(f"'{type_name(arg)}' object cannot be interpreted as an integer", span)
    return range(*args)


def _zip(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> List[tuple]:
    _check("zip", args, kwargs, span, 0, None)
    columns = [list(m.iterate(arg, span)) for arg in args]
    return list(zip(*columns))


def _dict(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> Dict[Any, Any]:
    if len(args) > 1:
        raise _mismatch(f"dict() takes at most 1 argument, got {len(args)}", span)
    result: Dict[Any, Any] = {}
    if args:
        source = args[0]
        pairs = list(source.items()) if isinstance(source, dict) else m.iterate(source, span)
        for pair in pairs:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise _mismatch(f"dict() sequence element must be a pair, got '{type_name(pair)}'", span)
            result[pair[0]] = pair[1]
    result.update(kwargs)
    return result


def _list(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> List[Any]:
    _check("list", args, kwargs, span, 0, 1)
    return list(m.iterate(args[0], span)) if args else []


def _tuple(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> tuple:
    _check("tuple", args, kwargs, span, 0, 1)
    return tuple(m.iterate(args[0], span)) if args else ()


def _str(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> str:
    _check("str", args, kwargs, span, 0, 1)
    return str(args[0]) if args else ""


def _int(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> int:
    _check("int", args, kwargs, span, 0, 2, ("base",))
    if not args:
        return 0
    value = args[0]
    if isinstance(value, str):
        base = args[1] if len(args) > 1 else kwargs.get("base", 10)
        return int(value.strip(), base)
    if isinstance(value, (bool, int, float)):
        return int(value)
    raise _mismatch(f"int() argument must be a string or a number, not '{type_name(value)}'", span)


def _float(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> float:
    _check("float", args, kwargs, span, 0, 1)
    if not args:
        return 0.0
    value = args[0]
    if isinstance(value, (str, bool, int, float)):
        return float(value)
    raise _mismatch(f"float() argument must be a string or a number, not '{type_name(value)}'", span)


def _enumerate(m: Machine, span: Span, args: List[Any], kwargs: Dict[str, Any]) -> List[tuple]:
    _check("enumerate", args, kwargs, span, 1, 2, ("start",))
    start = args[1] if len(args) > 1 else kwargs.get("start", 0)
    return [(start + i, item) for i, item in enumerate(m.iterate(args[0], span))]


BUILTINS: Dict[str, Builtin] = {
    name: Builtin(name, fn)
    for name, fn in (
        ("print", _print),
        ("len", _len),
        ("sum", _sum),
        ("max", _extreme("max", lambda a, b: a > b)),
        ("min", _extreme("min", lambda a, b: a < b)),
        ("sorted", _sorted),
        ("round", _round),
        ("range", _range),
        ("zip", _zip),
        ("dict", _dict),
        ("list", _list),
        ("tuple", _tuple),
        ("str", _str),
        ("int", _int),
        ("float", _float),
        ("enumerate", _enumerate),
    )
}


# Methods


def _delegate(name: str):
    def method(m: Machine, span: Span, receiver: Any, args: List[Any], kwargs: Dict[str, Any]) -> Any:
        return getattr(receiver, name)(*args, **kwargs)

    return method


def _join(m: Machine, span: Span, receiver: str, args: List[Any], kwargs: Dict[str, Any]) -> str:
    _check("join", args, kwargs, span, 1, 1)
    return receiver.join(m.iterate(args[0], span))


def _extend(m: Machine, span: Span, receiver: list, args: List[Any], kwargs: Dict[str, Any]) -> None:
    _check("extend", args, kwargs, span, 1, 1)
    receiver.extend(list(m.iterate(args[0], span)))


def _view(name: str):
    def method(m: Machine, span: Span, receiver: dict, args: List[Any], kwargs: Dict[str, Any]) -> list:
        _check(name, args, kwargs, span, 0, 0)
        return list(getattr(receiver, name)())

    return method


def _get(m: Machine, span: Span, receiver: dict, args: List[Any], kwargs: Dict[str, Any]) -> Any:
    _check("get", args, kwargs, span, 1, 2)
    try:
        return receiver.get(*args)
    except TypeError:
        raise _mismatch(f"unhashable type: '{type_name(args[0])}'", span) from None


STRING_METHODS = {
    "count": _delegate("count"),
    "join": _join,
    "split": _delegate("split"),
    "strip": _delegate("strip"),
    "lower": _delegate("lower"),
    "upper": _delegate("upper"),
    "startswith": _delegate("startswith"),
    "endswith": _delegate("endswith"),
    "replace": _delegate("replace"),
    "splitlines": _delegate("splitlines"),
}

LIST_METHODS = {
    "append": _delegate("append"),
    "extend": _extend,
    "count": _delegate("count"),
    "index": _delegate("index"),
    "pop": _delegate("pop"),
}

MAP_METHODS = {
    "get": _get,
    "keys": _view("keys"),
    "values": _view("values"),
    "items": _view("items"),
}

TUPLE_METHODS = {
    "count": _delegate("count"),
    "index": _delegate("index"),
}


def methods_for(value: Any) -> Dict[str, Callable[..., Any]]:
    if isinstance(value, str):
        return STRING_METHODS
    if isinstance(value, list):
        return LIST_METHODS
    if isinstance(value, dict):
        return MAP_METHODS
    if isinstance(value, tuple):
        return TUPLE_METHODS
    return {}


def bind_method(value: Any, name: str, span: Span) -> BoundMethod:
    """Look up a method on a value.

    Raises:
        EvalError: type-mismatch listing the available methods
    """
    table = methods_for(value)
    if name not in table:
        available = ", ".join(sorted(table)) or "none"
        raise _mismatch(
            f"'{type_name(value)}' has no attribute '{name}'; available methods: {available}", span
        )
    return BoundMethod(value, name, table[name])
