"""Tree-walking evaluator for the formal language."""

import logging
import operator
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List, Optional, Union

from deepqna.lang import nodes
from deepqna.lang.environment import Environment
from deepqna.lang.errors import ErrorKind, EvalError, FormalLanguageError, ParseError, Span
from deepqna.lang.hosts import Effect, HostFunction, HostRegistry
from deepqna.lang.natives import BUILTINS, bind_method
from deepqna.lang.outcome import EvalLimits, EvalOutcome, ErrorRecord, TerminalPayload
from deepqna.lang.parser import parse
from deepqna.lang.source import SourceBlock
from deepqna.lang.values import BoundMethod, Builtin, LazyGenerator, type_name

logger = logging.getLogger(__name__)

_BINARY = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": operator.truediv,
    "//": operator.floordiv,
    "%": operator.mod,
    "**": operator.pow,
}

_COMPARE = {
    "<": operator.lt,
    ">": operator.gt,
    "==": operator.eq,
    ">=": operator.ge,
    "<=": operator.le,
    "!=": operator.ne,
    "is": operator.is_,
    "is not": operator.is_not,
}

_SEQUENCES = (str, list, tuple)


class _Terminate(Exception):
    """Raised by a terminal host call to unwind the evaluation."""

    def __init__(self, value: Any):
        super().__init__("terminal")
        self.value = value


class Interpreter:
    """Evaluates programs against one environment and one host registry."""

    def __init__(
        self,
        env: Environment,
        hosts: Optional[HostRegistry] = None,
        limits: Optional[EvalLimits] = None,
    ):
        self.env = env
        self.hosts = hosts if hosts is not None else HostRegistry()
        self.limits = limits or EvalLimits()
        self.steps = 0
        self.printed: List[str] = []

    # Services used by builtins

    def tick(self, span: Span) -> None:
        self.steps += 1
        if self.steps > self.limits.max_steps:
            raise EvalError(
                ErrorKind.BUDGET_EXCEEDED,
                f"step budget of {self.limits.max_steps} exhausted",
                span,
            )

    def emit(self, text: str) -> None:
        self.printed.append(text)

    def iterate(self, value: Any, span: Span) -> Iterator[Any]:
        if isinstance(value, dict):
            items: Any = list(value)
        elif isinstance(value, (str, list, tuple, range, LazyGenerator)):
            items = value
        else:
            raise EvalError(
                ErrorKind.TYPE_MISMATCH, f"'{type_name(value)}' object is not iterable", span
            )
        for item in items:
            self.tick(span)
            yield item

    def call(self, func: Any, args: List[Any], kwargs: Dict[str, Any], span: Span) -> Any:
        if isinstance(func, HostFunction):
            return self._call_host(func, args, kwargs, span)
        if isinstance(func, Builtin):
            with _python_errors(span):
                return func.fn(self, span, args, kwargs)
        if isinstance(func, BoundMethod):
            with _python_errors(span):
                return func.fn(self, span, func.receiver, args, kwargs)
        raise EvalError(ErrorKind.TYPE_MISMATCH, f"'{type_name(func)}' object is not callable", span)

    def _call_host(
        self, host: HostFunction, args: List[Any], kwargs: Dict[str, Any], span: Span
    ) -> Any:
        problem = host.check_arguments(len(args), kwargs)
        if problem:
            raise EvalError(ErrorKind.TYPE_MISMATCH, problem, span)
        self.hosts.record_call(host.name)
        try:
            value = host.fn(*args, **kwargs)
        except Exception as e:
            message = str(e) or type(e).__name__
            logger.debug(f"Host function {host.name} failed: {message}")
            raise EvalError(ErrorKind.HOST_FAILURE, f"{host.name}: {message}", span) from e
        if host.effect is Effect.TERMINAL:
            raise _Terminate(value)
        return value

    # Program

    def run(self, program: nodes.Program) -> EvalOutcome:
        """Execute every statement, stopping at FinalAnswer or the first error."""
        result: Any = None
        terminal = None
        error = None
        try:
            for statement in program.statements:
                value = self.execute(statement)
                result = value if isinstance(statement, nodes.ExprStatement) else None
        except _Terminate as t:
            result = None
            terminal = TerminalPayload(value=t.value)
        except EvalError as e:
            result = None
            error = ErrorRecord.from_error(e)
        except RecursionError:
            result = None
            error = ErrorRecord(kind=ErrorKind.BUDGET_EXCEEDED, message="evaluation nested too deeply")
        return EvalOutcome(
            result=result, printed=list(self.printed), terminal=terminal, error=error, steps=self.steps
        )

    # Statements

    def execute(self, statement: nodes.Stmt) -> Any:
        self.tick(statement.span)
        return getattr(self, f"exec_{type(statement).__name__}")(statement)

    def _execute_block(self, statements: Any) -> None:
        for statement in statements:
            self.execute(statement)

    def exec_ExprStatement(self, statement: nodes.ExprStatement) -> Any:
        return self.evaluate(statement.expr)

    def exec_Assign(self, statement: nodes.Assign) -> None:
        value = self.evaluate(statement.value)
        for target in statement.targets:
            self.assign(target, value)

    def exec_AugAssign(self, statement: nodes.AugAssign) -> None:
        target = statement.target
        if isinstance(target, nodes.Subscript):
            container = self.evaluate(target.value)
            index = self.evaluate(target.index)
            current = self._subscript(container, index, target.span)
            updated = self.binary(statement.op, current, self.evaluate(statement.value), statement.span)
            self._store_item(container, index, updated, target.span)
        else:
            current = self.evaluate(target)
            updated = self.binary(statement.op, current, self.evaluate(statement.value), statement.span)
            self.assign(target, updated)

    def exec_ForLoop(self, statement: nodes.ForLoop) -> None:
        iterable = self.evaluate(statement.iterable)
        for item in self.iterate(iterable, statement.span):
            self.assign(statement.target, item)
            self._execute_block(statement.body)

    def exec_IfStatement(self, statement: nodes.IfStatement) -> None:
        if self.evaluate(statement.test):
            self._execute_block(statement.body)
        else:
            self._execute_block(statement.orelse)

    def assign(self, target: Any, value: Any) -> None:
        if isinstance(target, nodes.Name):
            self.env.assign(target.id, value)
        elif isinstance(target, nodes.Subscript):
            container = self.evaluate(target.value)
            index = self.evaluate(target.index)
            self._store_item(container, index, value, target.span)
        elif isinstance(target, (nodes.TupleLiteral, nodes.ListLiteral)):
            items = list(self.iterate(value, target.span))
            if len(items) != len(target.elements):
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH,
                    f"cannot unpack {len(items)} values into {len(target.elements)} targets",
                    target.span,
                )
            for element, item in zip(target.elements, items):
                self.assign(element, item)
        else:
            raise EvalError(ErrorKind.TYPE_MISMATCH, "cannot assign to this expression", target.span)

    def _store_item(self, container: Any, index: Any, value: Any, span: Span) -> None:
        if isinstance(index, slice):
            raise EvalError(ErrorKind.TYPE_MISMATCH, "slice assignment is not supported", span)
        if isinstance(container, list):
            try:
                container[index] = value
            except IndexError:
                raise EvalError(
                    ErrorKind.INDEX_OUT_OF_RANGE,
                    f"list assignment index {index} out of range for length {len(container)}",
                    span,
                ) from None
            except TypeError:
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH,
                    f"list indices must be integers, not '{type_name(index)}'",
                    span,
                ) from None
        elif isinstance(container, dict):
            try:
                container[index] = value
            except TypeError:
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH, f"unhashable type: '{type_name(index)}'", span
                ) from None
        else:
            raise EvalError(
                ErrorKind.TYPE_MISMATCH,
                f"'{type_name(container)}' object does not support item assignment",
                span,
            )

    # Expressions

    def evaluate(self, expr: Any) -> Any:
        self.tick(expr.span)
        return getattr(self, f"eval_{type(expr).__name__}")(expr)

    def eval_Constant(self, expr: nodes.Constant) -> Any:
        return expr.value

    def eval_Name(self, expr: nodes.Name) -> Any:
        value = self.env.lookup(expr.id, _UNBOUND)
        if value is not _UNBOUND:
            return value
        host = self.hosts.get(expr.id)
        if host is not None:
            return host
        if expr.id in BUILTINS:
            return BUILTINS[expr.id]
        raise EvalError(ErrorKind.NAME_UNBOUND, f"name '{expr.id}' is not defined", expr.span)

    def eval_Interpolated(self, expr: nodes.Interpolated) -> str:
        pieces = []
        for part in expr.parts:
            if isinstance(part, str):
                pieces.append(part)
                continue
            value = self.evaluate(part.expr)
            if part.conversion == "r":
                value = repr(value)
            elif part.conversion == "s":
                value = str(value)
            try:
                pieces.append(format(value, part.format_spec))
            except (TypeError, ValueError) as e:
                raise EvalError(ErrorKind.TYPE_MISMATCH, f"invalid format: {e}", part.span) from None
        return "".join(pieces)

    def eval_ListLiteral(self, expr: nodes.ListLiteral) -> List[Any]:
        return [self.evaluate(e) for e in expr.elements]

    def eval_TupleLiteral(self, expr: nodes.TupleLiteral) -> tuple:
        return tuple(self.evaluate(e) for e in expr.elements)

    def eval_DictLiteral(self, expr: nodes.DictLiteral) -> Dict[Any, Any]:
        result: Dict[Any, Any] = {}
        for key_expr, value_expr in expr.pairs:
            key = self.evaluate(key_expr)
            value = self.evaluate(value_expr)
            try:
                result[key] = value
            except TypeError:
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH, f"unhashable type: '{type_name(key)}'", key_expr.span
                ) from None
        return result

    def eval_UnaryOp(self, expr: nodes.UnaryOp) -> Any:
        operand = self.evaluate(expr.operand)
        if expr.op == "not":
            return not operand
        if isinstance(operand, bool) or not isinstance(operand, (int, float)):
            raise EvalError(
                ErrorKind.TYPE_MISMATCH,
                f"bad operand type for unary {expr.op}: '{type_name(operand)}'",
                expr.span,
            )
        return -operand if expr.op == "-" else +operand

    def eval_BinOp(self, expr: nodes.BinOp) -> Any:
        left = self.evaluate(expr.left)
        right = self.evaluate(expr.right)
        return self.binary(expr.op, left, right, expr.span)

    def binary(self, op: str, left: Any, right: Any, span: Span) -> Any:
        self._guard_size(op, left, right, span)
        try:
            result = _BINARY[op](left, right)
        except ZeroDivisionError:
            raise EvalError(ErrorKind.TYPE_MISMATCH, "division by zero", span) from None
        except OverflowError:
            raise EvalError(ErrorKind.TYPE_MISMATCH, "numeric result out of range", span) from None
        except (TypeError, ValueError):
            raise EvalError(
                ErrorKind.TYPE_MISMATCH,
                f"unsupported operand types for {op}: '{type_name(left)}' and '{type_name(right)}'",
                span,
            ) from None
        if isinstance(result, complex):
            raise EvalError(ErrorKind.TYPE_MISMATCH, f"{op} has no real result for {left!r} and {right!r}", span)
        return result

    def _guard_size(self, op: str, left: Any, right: Any, span: Span) -> None:
        if op == "**" and _is_int(left) and _is_int(right) and right > 0 and abs(left) > 1:
            if right * abs(left).bit_length() > self.limits.max_integer_bits:
                raise EvalError(ErrorKind.BUDGET_EXCEEDED, "integer result too large", span)
        elif op == "*":
            size = None
            if isinstance(left, _SEQUENCES) and _is_int(right):
                size = len(left) * right
            elif isinstance(right, _SEQUENCES) and _is_int(left):
                size = len(right) * left
            if size is not None and size > self.limits.max_sequence_length:
                raise EvalError(ErrorKind.BUDGET_EXCEEDED, "sequence result too large", span)

    def eval_BoolOp(self, expr: nodes.BoolOp) -> Any:
        value = None
        for operand in expr.values:
            value = self.evaluate(operand)
            if expr.op == "and" and not value:
                return value
            if expr.op == "or" and value:
                return value
        return value

    def eval_Compare(self, expr: nodes.Compare) -> bool:
        left = self.evaluate(expr.left)
        for op, comparator in zip(expr.ops, expr.comparators):
            right = self.evaluate(comparator)
            if not self._compare(op, left, right, expr.span):
                return False
            left = right
        return True

    def _compare(self, op: str, left: Any, right: Any, span: Span) -> bool:
        if op in ("in", "not in"):
            if isinstance(right, LazyGenerator):
                found = any(item == left for item in self.iterate(right, span))
            elif isinstance(right, (str, list, tuple, dict, range)):
                try:
                    found = left in right
                except TypeError:
                    raise EvalError(
                        ErrorKind.TYPE_MISMATCH,
                        f"'in <{type_name(right)}>' requires a compatible left operand, not '{type_name(left)}'",
                        span,
                    ) from None
            else:
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH,
                    f"argument of type '{type_name(right)}' is not a container",
                    span,
                )
            return found if op == "in" else not found
        try:
            return bool(_COMPARE[op](left, right))
        except TypeError:
            raise EvalError(
                ErrorKind.TYPE_MISMATCH,
                f"'{op}' not supported between '{type_name(left)}' and '{type_name(right)}'",
                span,
            ) from None

    def eval_Conditional(self, expr: nodes.Conditional) -> Any:
        if self.evaluate(expr.test):
            return self.evaluate(expr.body)
        return self.evaluate(expr.orelse)

    def eval_Call(self, expr: nodes.Call) -> Any:
        func = self.evaluate(expr.func)
        args = [self.evaluate(a) for a in expr.args]
        kwargs = {name: self.evaluate(value) for name, value in expr.keywords}
        return self.call(func, args, kwargs, expr.span)

    def eval_Attribute(self, expr: nodes.Attribute) -> Any:
        value = self.evaluate(expr.value)
        if isinstance(value, HostFunction):
            member = value.members.get(expr.attr)
            if member is None:
                available = ", ".join(sorted(value.members)) or "none"
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH,
                    f"'{value.name}' has no attribute '{expr.attr}'; available methods: {available}",
                    expr.span,
                )
            return member
        return bind_method(value, expr.attr, expr.span)

    def eval_Subscript(self, expr: nodes.Subscript) -> Any:
        container = self.evaluate(expr.value)
        index = self.evaluate(expr.index)
        return self._subscript(container, index, expr.span)

    def eval_Slice(self, expr: nodes.Slice) -> slice:
        bounds = [None if part is None else self.evaluate(part) for part in (expr.lower, expr.upper, expr.step)]
        for bound in bounds:
            if bound is not None and not _is_int(bound):
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH, f"slice indices must be integers, not '{type_name(bound)}'", expr.span
                )
        if bounds[2] == 0:
            raise EvalError(ErrorKind.TYPE_MISMATCH, "slice step cannot be zero", expr.span)
        return slice(*bounds)

    def _subscript(self, container: Any, index: Any, span: Span) -> Any:
        if isinstance(container, dict):
            if isinstance(index, slice):
                raise EvalError(ErrorKind.TYPE_MISMATCH, "maps cannot be sliced", span)
            try:
                return container[index]
            except KeyError:
                available = ", ".join(repr(k) for k in list(container)[:10]) or "none"
                raise EvalError(
                    ErrorKind.KEY_MISSING, f"key {index!r} not found; available keys: {available}", span
                ) from None
            except TypeError:
                raise EvalError(ErrorKind.TYPE_MISMATCH, f"unhashable type: '{type_name(index)}'", span) from None
        if isinstance(container, (str, list, tuple, range)):
            if isinstance(index, slice):
                return container[index]
            if not _is_int(index) and not isinstance(index, bool):
                raise EvalError(
                    ErrorKind.TYPE_MISMATCH,
                    f"{type_name(container)} indices must be integers, not '{type_name(index)}'",
                    span,
                )
            try:
                return container[index]
            except IndexError:
                raise EvalError(
                    ErrorKind.INDEX_OUT_OF_RANGE,
                    f"{type_name(container)} index {index} out of range for length {len(container)}",
                    span,
                ) from None
        raise EvalError(ErrorKind.TYPE_MISMATCH, f"'{type_name(container)}' object is not subscriptable", span)

    def eval_Comprehension(self, expr: nodes.Comprehension) -> Union[List[Any], LazyGenerator]:
        scope = self.env.child()
        first = self.evaluate(expr.clauses[0].iterable)
        items = self._comprehend(expr, scope, 0, first)
        if expr.kind == "list":
            return list(items)
        return LazyGenerator(items)

    def _comprehend(
        self, expr: nodes.Comprehension, scope: Environment, depth: int, iterable: Any
    ) -> Iterator[Any]:
        clause = expr.clauses[depth]
        for item in self.iterate(iterable, clause.span):
            with self._scope(scope):
                self.assign(clause.target, item)
                keep = all(self.evaluate(c) for c in clause.conditions)
            if not keep:
                continue
            if depth + 1 == len(expr.clauses):
                with self._scope(scope):
                    value = self.evaluate(expr.element)
                yield value
            else:
                with self._scope(scope):
                    inner = self.evaluate(expr.clauses[depth + 1].iterable)
                yield from self._comprehend(expr, scope, depth + 1, inner)

    @contextmanager
    def _scope(self, env: Environment) -> Iterator[None]:
        saved = self.env
        self.env = env
        try:
            yield
        finally:
            self.env = saved


_UNBOUND = object()


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


@contextmanager
def _python_errors(span: Span) -> Iterator[None]:
    """Map Python exceptions raised inside builtins and methods onto error kinds."""
    try:
        yield
    except (FormalLanguageError, _Terminate):
        raise
    except IndexError as e:
        raise EvalError(ErrorKind.INDEX_OUT_OF_RANGE, str(e), span) from None
    except KeyError as e:
        raise EvalError(ErrorKind.KEY_MISSING, f"key {e} not found", span) from None
    except ZeroDivisionError:
        raise EvalError(ErrorKind.TYPE_MISMATCH, "division by zero", span) from None
    except (TypeError, ValueError, OverflowError, AttributeError) as e:
        raise EvalError(ErrorKind.TYPE_MISMATCH, str(e), span) from None


def evaluate(
    program: nodes.Program,
    env: Environment,
    hosts: Optional[HostRegistry] = None,
    limits: Optional[EvalLimits] = None,
) -> EvalOutcome:
    """Evaluate a program.

    Args:
        program: Parsed program
        env: Environment mutated by assignments
        hosts: Host functions visible to the program
        limits: Step and size limits

    Returns:
        The evaluation outcome; errors are reported in it, not raised
    """
    return Interpreter(env, hosts, limits).run(program)


def evaluate_source(
    source: Union[SourceBlock, str],
    env: Environment,
    hosts: Optional[HostRegistry] = None,
    limits: Optional[EvalLimits] = None,
) -> EvalOutcome:
    """Parse and evaluate; lexing and parsing errors become the outcome's error."""
    try:
        program = parse(source)
    except RecursionError:
        return EvalOutcome(error=ErrorRecord.from_error(ParseError("expression nesting too deep")))
    except FormalLanguageError as e:
        return EvalOutcome(error=ErrorRecord.from_error(e))
    return evaluate(program, env, hosts, limits)
