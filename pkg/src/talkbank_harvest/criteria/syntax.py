"""This module provides the text syntax of filter expressions.

Grammar::

    expr  := or
    or    := and { "or" and }
    and   := atom { "and" atom }
    atom  := "not" atom | "(" expr ")" | pred
    pred  := exists(CODE) | nonempty(CODE.FIELD) | equals(CODE.FIELD, STRING)
           | in(CODE.FIELD, STRING {, STRING}) | age_in(CODE, NUMBER, NUMBER)

In a ``NUMBER`` position ``inf`` is an open upper bound; elsewhere it is an
ordinary code.
"""

import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, replace
from typing import Any, Literal

from lark import Lark, Token, Transformer
from lark.exceptions import (
    UnexpectedCharacters,
    UnexpectedEOF,
    UnexpectedInput,
    UnexpectedToken,
    VisitError,
)

from ..chat import FIELD_NAMES
from .nodes import AgeInRange, And, Equals, Exists, FilterExpr, InSet, NonEmpty, Not, Or

FILTER_GRAMMAR = r"""
    ?start: or_expr

    ?or_expr: and_expr (_OR and_expr)*
    ?and_expr: unary (_AND unary)*
    ?unary: _NOT unary -> negation
          | "(" or_expr ")"
          | call

    call: IDENT "(" [arg ("," arg)*] ")"

    ?arg: IDENT "." IDENT -> path
        | IDENT -> code
        | STRING -> string
        | NUMBER -> number

    _OR: "or"
    _AND: "and"
    _NOT: "not"

    IDENT: /[A-Za-z_][A-Za-z0-9_]*/
    STRING: /"(?:[^"\\\n]|\\.)*"/
    NUMBER: /\d+(?:\.\d+)?(?:[eE][+-]?\d+)?/

    %import common.WS
    %ignore WS
"""


class FilterSyntaxError(ValueError):
    """Raised when filter source text is invalid.

    Attributes:
        line: 1-based line of the offending input.
        column: 1-based column of the offending input.
    """

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Arg:
    kind: Literal["path", "code", "string", "number"]
    value: Any
    line: int
    column: int


def _position(token: Token) -> tuple[int, int]:
    return (token.line or 1, token.column or 1)


class _ToFilterExpr(Transformer[Token, FilterExpr]):
    """Turns the lark parse tree into FilterExpr nodes, validating
    predicate names, arity and fields."""

    def or_expr(self, children: list[FilterExpr]) -> FilterExpr:
        return Or(tuple(children))

    def and_expr(self, children: list[FilterExpr]) -> FilterExpr:
        return And(tuple(children))

    def negation(self, children: list[FilterExpr]) -> FilterExpr:
        return Not(children[0])

    def path(self, children: list[Token]) -> _Arg:
        code, field = children
        if str(field) not in FIELD_NAMES:
            raise FilterSyntaxError(
                f"Unknown field {str(field)!r}; expected one of "
                f"{', '.join(sorted(FIELD_NAMES))}",
                *_position(field),
            )
        return _Arg("path", (str(code), str(field)), *_position(code))

    def code(self, children: list[Token]) -> _Arg:
        return _Arg("code", str(children[0]), *_position(children[0]))

    def string(self, children: list[Token]) -> _Arg:
        return _Arg("string", json.loads(children[0]), *_position(children[0]))

    def number(self, children: list[Token]) -> _Arg:
        return _Arg("number", float(children[0]), *_position(children[0]))

    def call(self, children: list[Any]) -> FilterExpr:
        name: Token = children[0]
        args: list[_Arg] = [arg for arg in children[1:] if arg is not None]
        builder = _PREDICATES.get(str(name))
        if builder is None:
            raise FilterSyntaxError(
                f"Unknown predicate {str(name)!r}; expected one of "
                f"{', '.join(sorted(_PREDICATES))}",
                *_position(name),
            )
        signature, build = builder
        args = _open_bounds(args, signature)
        if not _matches_signature(args, signature):
            raise FilterSyntaxError(
                f"Bad arguments for {name}(); expected {name}({_describe(signature)})",
                *_position(name),
            )
        try:
            return build(args)
        except ValueError as e:
            raise FilterSyntaxError(f"Malformed {name}(): {e}", *_position(name)) from e


# A trailing "+" marks a kind that may repeat one or more times.
type _Signature = tuple[str, ...]


def _matches_signature(args: Sequence[_Arg], signature: _Signature) -> bool:
    kinds = [arg.kind for arg in args]
    if signature and signature[-1].endswith("+"):
        fixed, repeated = signature[:-1], signature[-1][:-1]
        return (
            len(kinds) > len(fixed)
            and tuple(kinds[: len(fixed)]) == fixed
            and all(kind == repeated for kind in kinds[len(fixed) :])
        )
    return tuple(kinds) == signature


def _open_bounds(args: list[_Arg], signature: _Signature) -> list[_Arg]:
    """Read a bare ``inf`` in a number slot as infinity."""
    return [
        replace(arg, kind="number", value=math.inf)
        if index < len(signature)
        and signature[index] == "number"
        and arg.kind == "code"
        and arg.value == "inf"
        else arg
        for index, arg in enumerate(args)
    ]


def _describe(signature: _Signature) -> str:
    names = {"path": "CODE.FIELD", "code": "CODE", "string": "STRING", "number": "NUMBER"}
    parts: list[str] = []
    for kind in signature:
        if kind.endswith("+"):
            parts.append(f"{names[kind[:-1]]} {{, {names[kind[:-1]]}}}")
        else:
            parts.append(names[kind])
    return ", ".join(parts)


_PREDICATES: dict[str, tuple[_Signature, Callable[[list[_Arg]], FilterExpr]]] = {
    "exists": (("code",), lambda a: Exists(a[0].value)),
    "nonempty": (("path",), lambda a: NonEmpty(*a[0].value)),
    "equals": (("path", "string"), lambda a: Equals(*a[0].value, a[1].value)),
    "in": (
        ("path", "string+"),
        lambda a: InSet(*a[0].value, tuple(arg.value for arg in a[1:])),
    ),
    "age_in": (
        ("code", "number", "number"),
        lambda a: AgeInRange(a[0].value, a[1].value, a[2].value),
    ),
}

_parser = Lark(FILTER_GRAMMAR, start="start", parser="lalr")


def _end_position(src: str) -> tuple[int, int]:
    lines = src.split("\n")
    return (len(lines), len(lines[-1]) + 1)


def parse_expr(src: str) -> FilterExpr:
    """Parse filter source text into a FilterExpr.

    ``and`` binds tighter than ``or``; parentheses group.

    Args:
        src: The filter text.

    Returns:
        The expression tree.

    Raises:
        FilterSyntaxError: On syntax errors, unknown predicates or fields,
            wrong arguments and malformed age ranges.

    Examples:
        >>> parse_expr("exists(CHI)")
        Exists(code='CHI')
        >>> parse_expr('equals(CHI.group, "TD") and age_in(CHI, 0, 72)')
        And(children=(Equals(code='CHI', field='group', value='TD'), AgeInRange(code='CHI', lo=0.0, hi=72.0)))
    """
    if not src.strip():
        raise FilterSyntaxError("Empty filter expression", 1, 1)

    try:
        tree = _parser.parse(src)
    except UnexpectedEOF as e:
        raise FilterSyntaxError(
            f"Unexpected end of input, expected one of {sorted(e.expected)}",
            *_end_position(src),
        ) from e
    except UnexpectedInput as e:
        if isinstance(e, UnexpectedToken) and e.token.type == "$END":
            message = "Unexpected end of input"
        elif isinstance(e, UnexpectedToken):
            message = f"Unexpected token {str(e.token)!r}"
        elif isinstance(e, UnexpectedCharacters):
            message = f"Unexpected character {src[e.pos_in_stream]!r}"
        else:
            message = "Syntax error"
        line, column = e.line, e.column
        if not isinstance(line, int) or line < 1:
            line, column = _end_position(src)
        raise FilterSyntaxError(message, line, column) from e

    try:
        return _ToFilterExpr().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FilterSyntaxError):
            raise e.orig_exc from None
        raise


def _format_number(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


def _operand(expr: FilterExpr) -> str:
    text = format_expr(expr)
    return f"({text})" if isinstance(expr, And | Or) else text


def format_expr(expr: FilterExpr) -> str:
    """Render an expression in canonical source form.

    ``parse_expr(format_expr(e)) == e`` for every well-formed ``e`` whose
    codes are identifiers.

    Examples:
        >>> format_expr(And((Exists("CHI"), Not(NonEmpty("MOT", "ses")))))
        'exists(CHI) and not nonempty(MOT.ses)'
    """
    match expr:
        case And(children):
            return " and ".join(_operand(child) for child in children)
        case Or(children):
            return " or ".join(_operand(child) for child in children)
        case Not(child):
            return f"not {_operand(child)}"
        case Exists(code):
            return f"exists({code})"
        case NonEmpty(code, field):
            return f"nonempty({code}.{field})"
        case Equals(code, field, value):
            return f"equals({code}.{field}, {json.dumps(value)})"
        case InSet(code, field, values):
            rendered = ", ".join(json.dumps(value) for value in values)
            return f"in({code}.{field}, {rendered})"
        case AgeInRange(code, lo, hi):
            return f"age_in({code}, {_format_number(lo)}, {_format_number(hi)})"

