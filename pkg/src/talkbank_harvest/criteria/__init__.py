from .evaluate import eval_expr
from .nodes import AgeInRange, And, Equals, Exists, FilterExpr, InSet, NonEmpty, Not, Or
from .syntax import FilterSyntaxError, format_expr, parse_expr

__all__ = [
    "AgeInRange",
    "And",
    "Equals",
    "Exists",
    "FilterExpr",
    "FilterSyntaxError",
    "InSet",
    "NonEmpty",
    "Not",
    "Or",
    "eval_expr",
    "format_expr",
    "parse_expr",
]
