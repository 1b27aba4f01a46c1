"""Evaluation of filter expressions against parsed headers."""

from ..chat import HeaderMetadata, get_field
from .nodes import AgeInRange, And, Equals, Exists, FilterExpr, InSet, NonEmpty, Not, Or


def eval_expr(expr: FilterExpr, header: HeaderMetadata) -> bool:
    """Evaluate a filter expression against one header.

    Evaluation is total: an absent participant or field makes the atom
    false instead of raising.

    Args:
        expr: A well-formed filter expression.
        header: The parsed header to test.

    Returns:
        Whether the header satisfies the expression.
    """
    match expr:
        case And(children):
            return all(eval_expr(child, header) for child in children)
        case Or(children):
            return any(eval_expr(child, header) for child in children)
        case Not(child):
            return not eval_expr(child, header)
        case Exists(code):
            return code in header.participants
        case NonEmpty(code, field):
            return get_field(header, code, field) is not None
        case Equals(code, field, value):
            actual = get_field(header, code, field)
            return actual is not None and actual.strip() == value.strip()
        case InSet(code, field, values):
            actual = get_field(header, code, field)
            return actual is not None and actual.strip() in {v.strip() for v in values}
        case AgeInRange(code, lo, hi):
            record = header.participants.get(code)
            if record is None or record.age_months is None:
                return False
            return lo <= record.age_months <= hi
