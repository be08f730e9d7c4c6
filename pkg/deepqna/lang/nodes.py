"""AST node types for the formal language.

Every node carries the span of the source construct it was built from.
Nodes are immutable; a Program is a tuple of statements.
"""

from dataclasses import dataclass
from typing import Any, Optional, Tuple, Union

from deepqna.lang.errors import Span


@dataclass(frozen=True)
class Node:
    """Base class for all nodes."""

    span: Span


# Expressions


@dataclass(frozen=True)
class Constant(Node):
    value: Any


@dataclass(frozen=True)
class Name(Node):
    id: str


@dataclass(frozen=True)
class FormattedValue(Node):
    """One `{expr!conv:spec}` region of an interpolated string."""

    expr: "Expr"
    conversion: Optional[str]
    format_spec: str


@dataclass(frozen=True)
class Interpolated(Node):
    parts: Tuple[Union[str, FormattedValue], ...]


@dataclass(frozen=True)
class ListLiteral(Node):
    elements: Tuple["Expr", ...]


@dataclass(frozen=True)
class TupleLiteral(Node):
    elements: Tuple["Expr", ...]


@dataclass(frozen=True)
class DictLiteral(Node):
    pairs: Tuple[Tuple["Expr", "Expr"], ...]


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class BoolOp(Node):
    op: str
    values: Tuple["Expr", ...]


@dataclass(frozen=True)
class Compare(Node):
    left: "Expr"
    ops: Tuple[str, ...]
    comparators: Tuple["Expr", ...]


@dataclass(frozen=True)
class Conditional(Node):
    test: "Expr"
    body: "Expr"
    orelse: "Expr"


@dataclass(frozen=True)
class Call(Node):
    func: "Expr"
    args: Tuple["Expr", ...]
    keywords: Tuple[Tuple[str, "Expr"], ...]


@dataclass(frozen=True)
class Attribute(Node):
    value: "Expr"
    attr: str


@dataclass(frozen=True)
class Slice(Node):
    lower: Optional["Expr"]
    upper: Optional["Expr"]
    step: Optional["Expr"]


@dataclass(frozen=True)
class Subscript(Node):
    value: "Expr"
    index: Union["Expr", Slice]


@dataclass(frozen=True)
class ForClause(Node):
    target: "Expr"
    iterable: "Expr"
    conditions: Tuple["Expr", ...]


@dataclass(frozen=True)
class Comprehension(Node):
    """A list comprehension (kind "list") or generator expression (kind "generator")."""

    kind: str
    element: "Expr"
    clauses: Tuple[ForClause, ...]


Expr = Union[
    Constant,
    Name,
    Interpolated,
    ListLiteral,
    TupleLiteral,
    DictLiteral,
    UnaryOp,
    BinOp,
    BoolOp,
    Compare,
    Conditional,
    Call,
    Attribute,
    Subscript,
    Comprehension,
]


# Statements


@dataclass(frozen=True)
class ExprStatement(Node):
    expr: Expr


@dataclass(frozen=True)
class Assign(Node):
    targets: Tuple[Expr, ...]
    value: Expr


@dataclass(frozen=True)
class AugAssign(Node):
    target: Expr
    op: str
    value: Expr


@dataclass(frozen=True)
class ForLoop(Node):
    target: Expr
    iterable: Expr
    body: Tuple["Stmt", ...]


@dataclass(frozen=True)
class IfStatement(Node):
    test: Expr
    body: Tuple["Stmt", ...]
    orelse: Tuple["Stmt", ...]


Stmt = Union[ExprStatement, Assign, AugAssign, ForLoop, IfStatement]


@dataclass(frozen=True)
class Program:
    """A parsed code block."""

    statements: Tuple[Stmt, ...]
    source: str = ""
