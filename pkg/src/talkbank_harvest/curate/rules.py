"""This module implements declarative label cleaning rules.

A rule file is a TOML document with one array of tables per column::

    [[group]]
    kind = "rename"
    from = ["typical", "normal"]
    to = "TD"

    [[group]]
    kind = "trim_trailing"
    chars = "_"

    [[group]]
    kind = "case_fold_to"
    canonical = "MOT_Adolescent"

    [[group]]
    kind = "fill_missing"
    default = "unspecified"

A ``rename`` without ``to`` removes the label, making it missing.
"""

import csv
import logging
import tomllib
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Final

from ..index import IndexRow, IndexTable

LABEL_COLUMNS: Final[frozenset[str]] = frozenset(
    {"name", "sex", "group", "ses", "study_type"}
)
PROTECTED_COLUMNS: Final[frozenset[str]] = frozenset(
    {"file_path", "corpus", "participants", "age_m", "participant_id"}
)


class RuleSetError(ValueError):
    """Raised when a rule set is invalid."""


@dataclass(frozen=True)
class Rename:
    """Replace any of ``sources`` by ``target``; a None target removes the
    label."""

    sources: tuple[str, ...]
    target: str | None

    def apply(self, value: str | None) -> str | None:
        return self.target if value in self.sources else value


@dataclass(frozen=True)
class TrimTrailing:
    chars: str

    def apply(self, value: str | None) -> str | None:
        if value is None:
            return None
        return value.rstrip(self.chars) or None


@dataclass(frozen=True)
class CaseFoldTo:
    """Replace every case variant of ``canonical`` by ``canonical``."""

    canonical: str

    def apply(self, value: str | None) -> str | None:
        if value is not None and value.casefold() == self.canonical.casefold():
            return self.canonical
        return value


@dataclass(frozen=True)
class FillMissing:
    default: str

    def apply(self, value: str | None) -> str | None:
        return self.default if value is None else value


type LabelRule = Rename | TrimTrailing | CaseFoldTo | FillMissing


def _produced_labels(rule: LabelRule) -> tuple[str, ...]:
    match rule:
        case Rename(target=target):
            return (target,) if target is not None else ()
        case CaseFoldTo(canonical=canonical):
            return (canonical,)
        case FillMissing(default=default):
            return (default,)
        case TrimTrailing():
            return ()


@dataclass(frozen=True)
class LabelRuleSet:
    """Ordered cleaning rules per index column.

    One pass applies a column's rules in order. Passes repeat until the
    value no longer changes, so applying a rule set twice equals applying
    it once.
    """

    rules: Mapping[str, tuple[LabelRule, ...]]

    def __post_init__(self) -> None:
        for column, rules in self.rules.items():
            _check_rule_column(column)
            for label in (label for rule in rules for label in _produced_labels(rule)):
                if self._one_pass(column, label) != label:
                    raise RuleSetError(
                        f"Rules for column {column!r} are not idempotent: "
                        f"label {label!r} produced by a rule is changed again."
                    )

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self.rules)

    def canonical_labels(self, column: str) -> frozenset[str]:
        """Labels that the rules of ``column`` can produce."""
        return frozenset(
            label for rule in self.rules.get(column, ()) for label in _produced_labels(rule)
        )

    def _one_pass(self, column: str, value: str | None) -> str | None:
        for rule in self.rules.get(column, ()):
            value = rule.apply(value)
        return value

    def normalize(self, column: str, value: str | None) -> str | None:
        """Apply the rules of ``column`` to one value until it is stable.

        Raises:
            RuleSetError: If the rules keep changing the value.
        """
        limit = 2 * len(self.rules.get(column, ())) + 2
        for _ in range(limit):
            result = self._one_pass(column, value)
            if result == value:
                return result
            value = result
        raise RuleSetError(f"Rules for column {column!r} do not settle on value {value!r}.")


def _check_rule_column(column: str) -> None:
    if column in PROTECTED_COLUMNS:
        raise RuleSetError(f"Column {column!r} can not be changed by label rules.")
    if column not in LABEL_COLUMNS:
        raise RuleSetError(
            f"Unknown label column {column!r}. Expected one of: "
            f"{', '.join(sorted(LABEL_COLUMNS))}."
        )


def _string(column: str, entry: Mapping[str, Any], key: str) -> str:
    value = entry.get(key)
    if not isinstance(value, str) or not value:
        raise RuleSetError(
            f"Rule {entry.get('kind')!r} of column {column!r} needs a non-empty "
            f"string {key!r}."
        )
    return value


def _parse_rule(column: str, entry: Mapping[str, Any]) -> LabelRule:
    match entry.get("kind"):
        case "rename":
            sources = entry.get("from")
            if isinstance(sources, str):
                sources = [sources]
            if not isinstance(sources, list) or not sources:
                raise RuleSetError(f"Rename rule of column {column!r} needs 'from'.")
            target = _string(column, entry, "to") if "to" in entry else None
            return Rename(tuple(str(s) for s in sources), target)  # pyright: ignore[reportUnknownArgumentType, reportUnknownVariableType]
        case "trim_trailing":
            return TrimTrailing(_string(column, entry, "chars"))
        case "case_fold_to":
            return CaseFoldTo(_string(column, entry, "canonical"))
        case "fill_missing":
            return FillMissing(_string(column, entry, "default"))
        case kind:
            raise RuleSetError(f"Unknown rule kind {kind!r} for column {column!r}.")


def rules_from_mapping(data: Mapping[str, Any]) -> LabelRuleSet:
    """Build a rule set from a parsed rule document.

    Raises:
        RuleSetError: On unknown or protected columns, unknown rule kinds,
            missing rule parameters or non-idempotent rules.
    """
    rules: dict[str, tuple[LabelRule, ...]] = {}
    for column, entries in data.items():
        _check_rule_column(column)
        if not isinstance(entries, list):
            raise RuleSetError(f"Rules of column {column!r} must be an array of tables.")
        parsed: list[LabelRule] = []
        for entry in entries:  # pyright: ignore[reportUnknownVariableType]
            if not isinstance(entry, dict):
                raise RuleSetError(f"Rules of column {column!r} must be an array of tables.")
            parsed.append(_parse_rule(column, entry))  # pyright: ignore[reportUnknownArgumentType]
        rules[column] = tuple(parsed)
    return LabelRuleSet(rules)


def load_rules(path: Path) -> LabelRuleSet:
    """Load a rule set from a TOML file.

    Raises:
        RuleSetError: If the file is not valid TOML or the rules are
            invalid.
    """
    try:
        with path.open("rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise RuleSetError(f"Invalid rule file {path}: {e}") from e
    return rules_from_mapping(data)


@dataclass(frozen=True)
class LabelChange:
    """One changed cell of the index table."""

    row: int
    column: str
    before: str | None
    after: str | None


def apply_rules(
    table: IndexTable, rules: LabelRuleSet
) -> tuple[IndexTable, list[LabelChange]]:
    """Apply a rule set to an index table.

    The input table is left unchanged. Row order, row count, ``file_path``
    and ``corpus`` are preserved.

    Args:
        table: The index table.
        rules: The rule set.

    Returns:
        The cleaned table and its change log, ordered by row then column.
    """
    logger = logging.getLogger(__name__)
    changes: list[LabelChange] = []
    rows: list[IndexRow] = []
    for index, row in enumerate(table.rows):
        updates: dict[str, str | None] = {}
        for column in rules.columns:
            before: str | None = getattr(row, column)
            after = rules.normalize(column, before or None)
            if column == "study_type":
                after = after or ""
            if after != before:
                updates[column] = after
                changes.append(LabelChange(index, column, before, after))
        rows.append(replace(row, **updates) if updates else row)  # pyright: ignore[reportArgumentType]

    logger.info(f"step=normalize: {len(changes)} label(s) changed in {len(rows)} row(s)")
    return table.with_rows(rows), changes


def write_change_log(changes: Sequence[LabelChange], path: Path) -> Path:
    """Write a change log as CSV with columns row, column, before, after."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(["row", "column", "before", "after"])
        for change in changes:
            writer.writerow(
                [change.row, change.column, change.before or "", change.after or ""]
            )
    return path
