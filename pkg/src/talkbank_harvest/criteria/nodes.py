"""Filter expression tree over CHAT header metadata."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..chat import FIELD_NAMES


def _check_code(code: str) -> None:
    if not code or any(c.isspace() or c == "|" for c in code):
        raise ValueError(f"Invalid participant code {code!r}.")


def _check_field(field: str) -> None:
    if field not in FIELD_NAMES:
        raise ValueError(
            f"Unknown participant field {field!r}. "
            f"Expected one of: {', '.join(sorted(FIELD_NAMES))}."
        )


@dataclass(frozen=True)
class And:
    """True when every child is true."""

    children: tuple[FilterExpr, ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("And needs at least 2 operands.")


@dataclass(frozen=True)
class Or:
    """True when any child is true."""

    children: tuple[FilterExpr, ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValueError("Or needs at least 2 operands.")


@dataclass(frozen=True)
class Not:
    child: FilterExpr


@dataclass(frozen=True)
class Exists:
    """True when the participant is declared in the header."""

    code: str

    def __post_init__(self) -> None:
        _check_code(self.code)


@dataclass(frozen=True)
class NonEmpty:
    """True when the participant's field is present and not blank."""

    code: str
    field: str

    def __post_init__(self) -> None:
        _check_code(self.code)
        _check_field(self.field)


@dataclass(frozen=True)
class Equals:
    """True when the trimmed field value equals ``value`` (case-sensitive)."""

    code: str
    field: str
    value: str

    def __post_init__(self) -> None:
        _check_code(self.code)
        _check_field(self.field)


@dataclass(frozen=True)
class InSet:
    """True when the trimmed field value is one of ``values``."""

    code: str
    field: str
    values: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_code(self.code)
        _check_field(self.field)
        if not self.values:
            raise ValueError("InSet needs at least one value.")


@dataclass(frozen=True)
class AgeInRange:
    """True when the participant's age in months lies in ``[lo, hi]``.

    ``hi`` may be ``math.inf`` for an open upper bound.
    """

    code: str
    lo: float
    hi: float

    def __post_init__(self) -> None:
        _check_code(self.code)
        if math.isnan(self.lo) or math.isnan(self.hi) or math.isinf(self.lo):
            raise ValueError(f"Invalid age range [{self.lo}, {self.hi}].")
        if not 0 <= self.lo <= self.hi:
            raise ValueError(
                f"Age range must satisfy 0 <= lo <= hi, got [{self.lo}, {self.hi}]."
            )


type FilterExpr = And | Or | Not | Exists | NonEmpty | Equals | InSet | AgeInRange
