"""Lexer and parser for the formal language.

The grammar is a closed, Python-shaped subset: assignment (plain, tuple
unpacking, subscript, augmented), expression statements, for-loops,
if/elif/else, arithmetic/comparison/boolean operators, membership tests,
calls with positional and keyword arguments, attribute access, indexing and
slicing, list/tuple/map literals, list comprehensions, generator expressions
and interpolated strings. Anything else is a ParseError.
"""

import ast
import logging
import textwrap
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Tuple, TypeVar, Union

from lark import Lark, Token as LarkToken, Transformer, v_args
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)
from lark.indenter import DedentError, Indenter

from deepqna.lang import nodes
from deepqna.lang.errors import FormalLanguageError, LexError, ParseError, Span
from deepqna.lang.source import SourceBlock

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Grammar version; additions to the construct set bump the minor number.
GRAMMAR_VERSION = "1.0"

GRAMMAR = r"""
file_input: (_NEWLINE | stmt)*

?stmt: simple_stmt | compound_stmt
simple_stmt: small_stmt (";" small_stmt)* ";"? _NEWLINE
?small_stmt: expr_stmt | assign_stmt | augassign_stmt
expr_stmt: testlist
assign_stmt: testlist ("=" testlist)+
augassign_stmt: testlist AUGOP testlist

?compound_stmt: if_stmt | for_stmt
if_stmt: "if" test ":" suite elif_clause* else_clause?
elif_clause: "elif" test ":" suite
else_clause: "else" ":" suite
for_stmt: "for" targets "in" testlist ":" suite
suite: simple_stmt | _NEWLINE _INDENT stmt+ _DEDENT

targets: target ("," target)*
?target: NAME -> name_target
       | "(" targets ")"

?testlist: test | testlist_tuple
testlist_tuple: test (("," test)+ ","? | ",")

?test: or_test ("if" or_test "else" test)?
?or_test: and_test ("or" and_test)*
?and_test: not_test ("and" not_test)*
?not_test: "not" not_test -> not_op
         | comparison
?comparison: arith_expr (comp_op arith_expr)*
!comp_op: "<" | ">" | "==" | ">=" | "<=" | "!=" | "in" | "not" "in" | "is" | "is" "not"

?arith_expr: term (_add_op term)*
?term: factor (_mul_op factor)*
?factor: _unary_op factor | power
?power: atom_expr ("**" factor)?
!_add_op: "+" | "-"
!_mul_op: "*" | "/" | "//" | "%"
!_unary_op: "+" | "-"

?atom_expr: atom_expr "(" arguments? ")" -> call
          | atom_expr "[" subscript "]" -> getitem
          | atom_expr "." NAME -> getattr
          | atom

arguments: argvalue ("," argvalue)* ","?
         | test comp_clauses -> genarg
?argvalue: test ("=" test)?

?subscript: test
          | [test] ":" [test] [sliceop] -> slice
sliceop: ":" [test]

?atom: "(" ")" -> empty_tuple
     | "(" test ")"
     | "(" test (("," test)+ ","? | ",") ")" -> tuple_literal
     | "(" test comp_clauses ")" -> generator
     | "[" list_items? "]" -> list_literal
     | "[" test comp_clauses "]" -> list_comp
     | "{" dict_items? "}" -> dict_literal
     | NAME -> var
     | DEC_NUMBER -> int_literal
     | FLOAT_NUMBER -> float_literal
     | (STRING | LONG_STRING)+ -> strings
     | "None" -> const_none
     | "True" -> const_true
     | "False" -> const_false

list_items: test ("," test)* ","?
dict_items: key_value ("," key_value)* ","?
key_value: test ":" test

comp_clauses: comp_for (comp_for | comp_if)*
comp_for: "for" targets "in" or_test
comp_if: "if" or_test

NAME: /[^\W\d]\w*/
DEC_NUMBER: /0|[1-9][0-9_]*/
FLOAT_NUMBER.2: /(\d+\.\d*|\.\d+)([eE][-+]?\d+)?|\d+[eE][-+]?\d+/
STRING.2: /[rRuUfF]{0,2}("(?!"").*?(?<!\\)(\\\\)*?"|'(?!'').*?(?<!\\)(\\\\)*?')/
LONG_STRING.3: /[rRuUfF]{0,2}(""" + '"""' + r""".*?(?<!\\)(\\\\)*?""" + '"""' + r"""|'''.*?(?<!\\)(\\\\)*?''')/s
AUGOP: "+=" | "-=" | "*=" | "/="

COMMENT: /#[^\n]*/
_NEWLINE: ( /\r?\n[\t ]*/ | COMMENT )+

%ignore /[\t \f]+/
%ignore /\\[\t \f]*\r?\n/
%ignore COMMENT
%declare _INDENT _DEDENT
"""

KEYWORDS = frozenset(
    {"for", "in", "if", "elif", "else", "not", "and", "or", "is", "None", "True", "False"}
)


class _BlockIndenter(Indenter):
    NL_type = "_NEWLINE"
    OPEN_PAREN_types = ["LPAR", "LSQB", "LBRACE"]
    CLOSE_PAREN_types = ["RPAR", "RSQB", "RBRACE"]
    INDENT_type = "_INDENT"
    DEDENT_type = "_DEDENT"
    tab_len = 8


_LARK = Lark(
    GRAMMAR,
    parser="lalr",
    lexer="basic",
    postlex=_BlockIndenter(),
    start=["file_input", "test"],
    propagate_positions=True,
    maybe_placeholders=True,
)


@dataclass(frozen=True)
class Region:
    """An embedded expression region inside an interpolated string."""

    text: str
    offset: int
    conversion: Optional[str] = None
    format_spec: str = ""


@dataclass(frozen=True)
class Token:
    """A lexical token with its span."""

    kind: str
    text: str
    span: Span
    regions: Tuple[Region, ...] = ()


def _source_text(source: Union[SourceBlock, str]) -> str:
    text = source.text if isinstance(source, SourceBlock) else source
    text = textwrap.dedent(text)
    if not text.endswith("\n"):
        text += "\n"
    return text


def _string_prefix(text: str) -> str:
    prefix = ""
    for ch in text:
        if ch in "\"'":
            break
        prefix += ch
    return prefix


def _string_body(text: str) -> Tuple[str, str, str]:
    """Split a string token into (prefix, quote, body)."""
    prefix = _string_prefix(text)
    rest = text[len(prefix):]
    quote = rest[:3] if rest[:3] in ('"""', "'''") else rest[:1]
    return prefix, quote, rest[len(quote):-len(quote)]


def _find_region_end(body: str, start: int) -> int:
    depth = 0
    quote: Optional[str] = None
    for j in range(start, len(body)):
        c = body[j]
        if quote:
            if c == quote:
                quote = None
            continue
        if c in "'\"":
            quote = c
        elif c in "([{":
            depth += 1
        elif c in ")]}":
            if c == "}" and depth == 0:
                return j
            depth -= 1
    return -1


def _make_region(inner: str, offset: int, span: Span) -> Region:
    depth = 0
    quote: Optional[str] = None
    cut = len(inner)
    for j, c in enumerate(inner):
        if quote:
            if c == quote:
                quote = None
            continue
        if c in "'\"":
            quote = c
        elif c in "([{":
            depth += 1
        elif c in ")]}":
            depth -= 1
        elif depth == 0 and c == ":":
            cut = j
            break
        elif depth == 0 and c == "!" and inner[j + 1 : j + 2] != "=":
            cut = j
            break
    expr_text, rest = inner[:cut], inner[cut:]
    if not expr_text.strip():
        raise LexError("empty expression in interpolated string", span)
    conversion = None
    format_spec = ""
    if rest.startswith("!"):
        conversion = rest[1:2]
        if conversion not in ("r", "s"):
            raise LexError(f"invalid conversion {rest[:2]!r} in interpolated string", span)
        rest = rest[2:]
    if rest.startswith(":"):
        format_spec = rest[1:]
    return Region(expr_text, offset, conversion, format_spec)


def split_interpolated(body: str, span: Span) -> List[Union[str, Region]]:
    """Split the body of an interpolated string into raw literals and regions."""
    parts: List[Union[str, Region]] = []
    literal: List[str] = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "{":
            if body.startswith("{{", i):
                literal.append("{")
                i += 2
                continue
            end = _find_region_end(body, i + 1)
            if end < 0:
                raise LexError("unterminated '{' in interpolated string", span)
            if literal:
                parts.append("".join(literal))
                literal = []
            parts.append(_make_region(body[i + 1 : end], i + 1, span))
            i = end + 1
        elif ch == "}":
            if body.startswith("}}", i):
                literal.append("}")
                i += 2
                continue
            raise LexError("single '}' is not allowed in an interpolated string", span)
        else:
            literal.append(ch)
            i += 1
    if literal:
        parts.append("".join(literal))
    return parts


def _token_kind(tok: LarkToken) -> str:
    if tok.type == "NAME":
        return "ident"
    if tok.type in ("DEC_NUMBER", "FLOAT_NUMBER"):
        return "number"
    if tok.type in ("STRING", "LONG_STRING"):
        if "f" in _string_prefix(str(tok)).lower():
            return "interpolated-string"
        return "string"
    if tok.type == "_NEWLINE":
        return "newline"
    if tok.type == "_INDENT":
        return "indent"
    if tok.type == "_DEDENT":
        return "dedent"
    if tok.type == "AUGOP":
        return "augassign"
    if str(tok) in KEYWORDS:
        return "keyword"
    if str(tok) == "=":
        return "assign"
    return "op"


def _token_span(tok: Any) -> Span:
    return Span(max(getattr(tok, "line", 0) or 0, 0), max(getattr(tok, "column", 0) or 0, 0))


def _translate(error: Exception) -> FormalLanguageError:
    """Map lark exceptions onto the formal language error types."""
    if isinstance(error, UnexpectedCharacters):
        span = Span(error.line, error.column)
        if error.char in "\"'":
            return LexError("unterminated string literal", span)
        return LexError(f"illegal character {error.char!r}", span)
    if isinstance(error, UnexpectedToken):
        token = error.token
        span = Span(max(error.line, 0), max(error.column, 0))
        if token.type == "$END":
            return ParseError("unexpected end of input", span)
        if token.type == "_NEWLINE":
            return ParseError("unexpected end of line", span)
        if token.type in ("_INDENT", "_DEDENT"):
            return ParseError("unexpected indentation", span)
        return ParseError(f"unexpected {str(token)!r}", span)
    if isinstance(error, UnexpectedEOF):
        return ParseError("unexpected end of input", Span(max(error.line, 0), max(error.column, 0)))
    if isinstance(error, DedentError):
        return ParseError(f"inconsistent indentation: {error}")
    if isinstance(error, UnexpectedInput):
        return ParseError(str(error), Span(max(error.line, 0), max(error.column, 0)))
    return ParseError(str(error))


def _guarded(action: Callable[[], T]) -> T:
    try:
        return action()
    except VisitError as e:
        if isinstance(e.orig_exc, FormalLanguageError):
            raise e.orig_exc from None
        raise
    except (UnexpectedInput, DedentError) as e:
        raise _translate(e) from None
    except RecursionError:
        raise ParseError("expression nesting too deep") from None


def tokenize(source: Union[SourceBlock, str]) -> List[Token]:
    """Split source text into tokens, each with a span."""
    text = _source_text(source)

    def lex() -> List[Token]:
        tokens = []
        for tok in _LARK.lex(text):
            kind = _token_kind(tok)
            span = _token_span(tok)
            regions: Tuple[Region, ...] = ()
            if kind == "interpolated-string":
                _, _, body = _string_body(str(tok))
                regions = tuple(
                    p for p in split_interpolated(body, span) if isinstance(p, Region)
                )
            tokens.append(Token(kind, str(tok), span, regions))
        return tokens

    return _guarded(lex)


def _valid_target(node: Any) -> bool:
    if isinstance(node, (nodes.Name, nodes.Subscript)):
        return True
    if isinstance(node, (nodes.TupleLiteral, nodes.ListLiteral)):
        return all(_valid_target(e) for e in node.elements)
    return False


@v_args(meta=True)
class _AstBuilder(Transformer):
    """Turns the lark parse tree into formal language AST nodes."""

    def __init__(self, span_override: Optional[Span] = None):
        super().__init__()
        self.span_override = span_override

    def _span(self, meta: Any) -> Span:
        if self.span_override is not None:
            return self.span_override
        if getattr(meta, "empty", True):
            return Span(0, 0)
        return Span(meta.line, meta.column)

    # Statements

    def file_input(self, meta, children):
        return _flatten(children)

    def simple_stmt(self, meta, children):
        return list(children)

    def suite(self, meta, children):
        return tuple(_flatten(children))

    def expr_stmt(self, meta, children):
        return nodes.ExprStatement(self._span(meta), children[0])

    def assign_stmt(self, meta, children):
        *targets, value = children
        for target in targets:
            if not _valid_target(target):
                raise ParseError("cannot assign to this expression", target.span)
        return nodes.Assign(self._span(meta), tuple(targets), value)

    def augassign_stmt(self, meta, children):
        target, op, value = children
        if not isinstance(target, (nodes.Name, nodes.Subscript)):
            raise ParseError("illegal target for augmented assignment", target.span)
        return nodes.AugAssign(self._span(meta), target, str(op)[:-1], value)

    def if_stmt(self, meta, children):
        test, body, *rest = children
        orelse: Tuple[Any, ...] = ()
        if rest and rest[-1][0] == "else":
            orelse = rest.pop()[1]
        for clause in reversed(rest):
            _, clause_span, clause_test, clause_body = clause
            orelse = (nodes.IfStatement(clause_span, clause_test, clause_body, orelse),)
        return nodes.IfStatement(self._span(meta), test, body, orelse)

    def elif_clause(self, meta, children):
        return ("elif", self._span(meta), children[0], children[1])

    def else_clause(self, meta, children):
        return ("else", children[0])

    def for_stmt(self, meta, children):
        target, iterable, body = children
        return nodes.ForLoop(self._span(meta), target, iterable, body)

    def targets(self, meta, children):
        if len(children) == 1:
            return children[0]
        return nodes.TupleLiteral(self._span(meta), tuple(children))

    def name_target(self, meta, children):
        return nodes.Name(self._span(meta), str(children[0]))

    # Expressions

    def testlist_tuple(self, meta, children):
        return nodes.TupleLiteral(self._span(meta), tuple(children))

    def test(self, meta, children):
        body, test, orelse = children
        return nodes.Conditional(self._span(meta), test, body, orelse)

    def or_test(self, meta, children):
        return nodes.BoolOp(self._span(meta), "or", tuple(children))

    def and_test(self, meta, children):
        return nodes.BoolOp(self._span(meta), "and", tuple(children))

    def not_op(self, meta, children):
        return nodes.UnaryOp(self._span(meta), "not", children[0])

    def comparison(self, meta, children):
        left = children[0]
        ops = tuple(children[1::2])
        comparators = tuple(children[2::2])
        return nodes.Compare(self._span(meta), left, ops, comparators)

    def comp_op(self, meta, children):
        return " ".join(str(tok) for tok in children)

    def _fold(self, meta, children):
        node = children[0]
        for op, right in zip(children[1::2], children[2::2]):
            node = nodes.BinOp(self._span(meta), str(op), node, right)
        return node

    def arith_expr(self, meta, children):
        return self._fold(meta, children)

    def term(self, meta, children):
        return self._fold(meta, children)

    def factor(self, meta, children):
        op, operand = children
        return nodes.UnaryOp(self._span(meta), str(op), operand)

    def power(self, meta, children):
        base, exponent = children
        return nodes.BinOp(self._span(meta), "**", base, exponent)

    def call(self, meta, children):
        func = children[0]
        args: Tuple[Any, ...] = ()
        keywords: Tuple[Tuple[str, Any], ...] = ()
        if len(children) > 1 and children[1] is not None:
            args, keywords = children[1]
        return nodes.Call(self._span(meta), func, args, keywords)

    def arguments(self, meta, children):
        args = []
        keywords = []
        for child in children:
            if isinstance(child, _Keyword):
                if any(name == child.name for name, _ in keywords):
                    raise ParseError(f"keyword argument repeated: {child.name}", child.span)
                keywords.append((child.name, child.value))
            else:
                if keywords:
                    raise ParseError("positional argument follows keyword argument", child.span)
                args.append(child)
        return tuple(args), tuple(keywords)

    def genarg(self, meta, children):
        element, clauses = children
        generator = nodes.Comprehension(self._span(meta), "generator", element, clauses)
        return (generator,), ()

    def argvalue(self, meta, children):
        name, value = children
        if not isinstance(name, nodes.Name):
            raise ParseError("keyword argument name must be an identifier", name.span)
        return _Keyword(name.id, value, name.span)

    def getitem(self, meta, children):
        value, index = children
        return nodes.Subscript(self._span(meta), value, index)

    def getattr(self, meta, children):
        value, name = children
        return nodes.Attribute(self._span(meta), value, str(name))

    def slice(self, meta, children):
        lower, upper, step = children
        return nodes.Slice(self._span(meta), lower, upper, step)

    def sliceop(self, meta, children):
        return children[0]

    def empty_tuple(self, meta, children):
        return nodes.TupleLiteral(self._span(meta), ())

    def tuple_literal(self, meta, children):
        return nodes.TupleLiteral(self._span(meta), tuple(children))

    def generator(self, meta, children):
        element, clauses = children
        return nodes.Comprehension(self._span(meta), "generator", element, clauses)

    def list_literal(self, meta, children):
        elements = children[0] if children else ()
        return nodes.ListLiteral(self._span(meta), tuple(elements))

    def list_items(self, meta, children):
        return tuple(children)

    def list_comp(self, meta, children):
        element, clauses = children
        return nodes.Comprehension(self._span(meta), "list", element, clauses)

    def dict_literal(self, meta, children):
        pairs = children[0] if children else ()
        return nodes.DictLiteral(self._span(meta), tuple(pairs))

    def dict_items(self, meta, children):
        return tuple(children)

    def key_value(self, meta, children):
        return (children[0], children[1])

    def comp_clauses(self, meta, children):
        clauses: List[nodes.ForClause] = []
        for child in children:
            if child[0] == "for":
                _, span, target, iterable = child
                clauses.append(nodes.ForClause(span, target, iterable, ()))
            else:
                last = clauses[-1]
                clauses[-1] = nodes.ForClause(
                    last.span, last.target, last.iterable, last.conditions + (child[1],)
                )
        return tuple(clauses)

    def comp_for(self, meta, children):
        return ("for", self._span(meta), children[0], children[1])

    def comp_if(self, meta, children):
        return ("if", children[0])

    def var(self, meta, children):
        return nodes.Name(self._span(meta), str(children[0]))

    def int_literal(self, meta, children):
        return nodes.Constant(self._span(meta), int(str(children[0]).replace("_", "")))

    def float_literal(self, meta, children):
        return nodes.Constant(self._span(meta), float(str(children[0])))

    def const_none(self, meta, children):
        return nodes.Constant(self._span(meta), None)

    def const_true(self, meta, children):
        return nodes.Constant(self._span(meta), True)

    def const_false(self, meta, children):
        return nodes.Constant(self._span(meta), False)

    def strings(self, meta, children):
        span = self._span(meta)
        parts: List[Union[str, nodes.FormattedValue]] = []
        for tok in children:
            parts.extend(self._string_parts(str(tok), _token_span(tok) if self.span_override is None else span))
        if all(isinstance(p, str) for p in parts):
            return nodes.Constant(span, "".join(parts))  # type: ignore[arg-type]
        merged: List[Union[str, nodes.FormattedValue]] = []
        for part in parts:
            if isinstance(part, str) and merged and isinstance(merged[-1], str):
                merged[-1] = merged[-1] + part
            elif part != "":
                merged.append(part)
        return nodes.Interpolated(span, tuple(merged))

    def _string_parts(self, text: str, span: Span) -> List[Union[str, nodes.FormattedValue]]:
        prefix, quote, body = _string_body(text)
        if "f" not in prefix.lower():
            try:
                return [ast.literal_eval(text)]
            except (SyntaxError, ValueError) as e:
                raise LexError(f"invalid string literal: {e}", span) from None
        raw = "r" in prefix.lower()
        parts: List[Union[str, nodes.FormattedValue]] = []
        for piece in split_interpolated(body, span):
            if isinstance(piece, str):
                parts.append(_decode_literal(piece, quote, raw))
            else:
                expr = parse_expression(piece.text, span)
                parts.append(
                    nodes.FormattedValue(span, expr, piece.conversion, piece.format_spec)
                )
        return parts


@dataclass(frozen=True)
class _Keyword:
    name: str
    value: Any
    span: Span


def _decode_literal(raw_text: str, quote: str, raw: bool) -> str:
    if raw:
        return raw_text
    try:
        return ast.literal_eval(quote + raw_text + quote)
    except (SyntaxError, ValueError):
        return raw_text


def _flatten(children: List[Any]) -> List[Any]:
    statements: List[Any] = []
    for child in children:
        if isinstance(child, list):
            statements.extend(child)
        elif child is not None:
            statements.append(child)
    return statements


def parse_expression(text: str, span: Span) -> Any:
    """Parse one embedded expression; every node gets the enclosing span."""
    flat = " ".join(text.strip().splitlines())
    tree = _guarded(lambda: _LARK.parse(flat, start="test"))
    return _guarded(lambda: _AstBuilder(span_override=span).transform(tree))


def parse(source: Union[SourceBlock, str]) -> nodes.Program:
    """Parse a code block into a Program."""
    text = _source_text(source)
    tree = _guarded(lambda: _LARK.parse(text, start="file_input"))
    statements = _guarded(lambda: _AstBuilder().transform(tree))
    return nodes.Program(tuple(statements), text)
