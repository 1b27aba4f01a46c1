"""This module defines the index table and its CSV form."""

import csv
import json
from collections.abc import Iterator, Sequence
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Final, Literal, Self

type ColumnName = Literal[
    "file_path",
    "corpus",
    "participants",
    "name",
    "age_m",
    "sex",
    "group",
    "ses",
    "study_type",
    "participant_id",
]

COLUMNS: Final[tuple[ColumnName, ...]] = (
    "file_path",
    "corpus",
    "participants",
    "name",
    "age_m",
    "sex",
    "group",
    "ses",
    "study_type",
    "participant_id",
)

# Columns whose empty CSV field means a missing value.
OPTIONAL_COLUMNS: Final[frozenset[str]] = frozenset(
    {"name", "age_m", "sex", "group", "ses", "participant_id"}
)


def check_column(column: str) -> ColumnName:
    """Validate a column name.

    Raises:
        ValueError: If ``column`` is not part of the index schema.
    """
    if column not in COLUMNS:
        raise ValueError(f"Unknown column {column!r}. Expected one of: {', '.join(COLUMNS)}.")
    return column  # pyright: ignore[reportReturnType]


def format_age(age_m: float) -> str:
    return f"{age_m:.1f}"


@dataclass(frozen=True)
class IndexRow:
    """One matching CHAT file.

    ``participants`` and ``study_type`` are ``", "``-joined lists. Optional
    fields are None when missing, never empty strings.
    """

    file_path: str
    corpus: str
    participants: str
    name: str | None = None
    age_m: float | None = None
    sex: str | None = None
    group: str | None = None
    ses: str | None = None
    study_type: str = ""
    participant_id: str | None = None

    def __post_init__(self) -> None:
        if not self.file_path:
            raise ValueError("file_path must not be empty.")
        for name in OPTIONAL_COLUMNS - {"age_m"}:
            if getattr(self, name) == "":
                raise ValueError(f"Missing {name} must be None, not an empty string.")

    @property
    def participant_codes(self) -> tuple[str, ...]:
        return tuple(self.participants.split(", ")) if self.participants else ()

    def get(self, column: str) -> str | None:
        """Return the rendered value of a column, None when missing."""
        value = getattr(self, check_column(column))
        if value is None:
            return None
        if column == "age_m":
            return format_age(value)
        return str(value)

    def to_record(self) -> list[str]:
        return [self.get(column) or "" for column in COLUMNS]

    @classmethod
    def from_record(cls, record: Sequence[str]) -> Self:
        """Build a row from CSV cells in column order."""
        if len(record) != len(COLUMNS):
            raise ValueError(f"Expected {len(COLUMNS)} fields, got {len(record)}.")
        values = dict(zip(COLUMNS, record, strict=True))
        return cls(
            file_path=values["file_path"],
            corpus=values["corpus"],
            participants=values["participants"],
            name=values["name"] or None,
            age_m=float(values["age_m"]) if values["age_m"] else None,
            sex=values["sex"] or None,
            group=values["group"] or None,
            ses=values["ses"] or None,
            study_type=values["study_type"],
            participant_id=values["participant_id"] or None,
        )


@dataclass(frozen=True)
class Provenance:
    """Where an index table came from.

    Attributes:
        criteria: Target criteria text.
        mirror_root: Absolute mirror root.
        created_at: ISO 8601 UTC creation timestamp.
        focus: Focus speaker code.
    """

    criteria: str
    mirror_root: str
    created_at: str
    focus: str = "CHI"


def _sort_key(row: IndexRow) -> tuple[str, str]:
    return (row.corpus, row.file_path)


@dataclass(frozen=True)
class IndexTable:
    """Ordered, immutable index of matching files.

    Rows are sorted by ``(corpus, file_path)`` and file paths are unique.
    Use :meth:`from_rows` to build a table from unsorted rows.
    """

    rows: tuple[IndexRow, ...] = ()
    provenance: Provenance | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        paths = [row.file_path for row in self.rows]
        if len(set(paths)) != len(paths):
            raise ValueError("file_path values must be unique within a table.")
        keys = [_sort_key(row) for row in self.rows]
        if keys != sorted(keys):
            raise ValueError("Rows must be sorted by (corpus, file_path).")

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[IndexRow],
        provenance: Provenance | None = None,
        warnings: Sequence[str] = (),
    ) -> Self:
        return cls(tuple(sorted(rows, key=_sort_key)), provenance, tuple(warnings))

    @property
    def columns(self) -> tuple[ColumnName, ...]:
        return COLUMNS

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[IndexRow]:
        return iter(self.rows)

    def column(self, column: str) -> list[str | None]:
        """Rendered values of one column in row order."""
        name = check_column(column)
        return [row.get(name) for row in self.rows]

    def with_rows(self, rows: Sequence[IndexRow], warnings: Sequence[str] = ()) -> Self:
        """Copy of this table with other rows and additional warnings."""
        return replace(
            self,
            rows=tuple(sorted(rows, key=_sort_key)),
            warnings=self.warnings + tuple(warnings),
        )


def provenance_path(path: Path) -> Path:
    """Sidecar file holding the provenance of the index at ``path``."""
    return path.with_name(f"{path.name}.provenance.json")


def write_index(table: IndexTable, path: Path) -> Path:
    """Write an index table as RFC 4180 CSV.

    The first line is the column header. Missing values are empty fields
    and ages are written with one decimal. The file is written under a
    temporary name and then renamed, so an interrupted write leaves any
    earlier index in place. A provenance sidecar is written next to the
    CSV when the table has provenance.

    Args:
        table: The table to write.
        path: Output CSV path. Parent directories are created.

    Returns:
        The CSV path.

    Raises:
        OSError: If the path is not writable.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    staging = path.with_name(f".{path.name}.tmp")
    try:
        with staging.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(COLUMNS)
            writer.writerows(row.to_record() for row in table.rows)
        staging.replace(path)
    finally:
        staging.unlink(missing_ok=True)

    if table.provenance is not None:
        sidecar = asdict(table.provenance) | {"columns": list(COLUMNS), "rows": len(table)}
        sidecar_staging = path.with_name(f".{provenance_path(path).name}.tmp")
        sidecar_staging.write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        sidecar_staging.replace(provenance_path(path))
    return path


def read_index(path: Path) -> IndexTable:
    """Read a CSV written by :func:`write_index`.

    Raises:
        ValueError: If the header line does not match the index schema.
    """
    with path.open(encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != COLUMNS:
            raise ValueError(f"{path} is not an index table: unexpected header {header}.")
        rows = [IndexRow.from_record(record) for record in reader]

    provenance = None
    sidecar = provenance_path(path)
    if sidecar.exists():
        data = json.loads(sidecar.read_text(encoding="utf-8"))
        names = {f.name for f in fields(Provenance)}
        provenance = Provenance(**{k: v for k, v in data.items() if k in names})
    return IndexTable.from_rows(rows, provenance)
