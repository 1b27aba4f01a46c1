"""Conversion of index tables to and from pandas DataFrames."""

from typing import Any

import pandas as pd

from .table import COLUMNS, IndexRow, IndexTable, Provenance


def to_dataframe(table: IndexTable) -> pd.DataFrame:
    """Convert an index table to a DataFrame with the index columns.

    Missing values become ``None`` (``NaN`` in ``age_m``). The provenance
    is stored in ``DataFrame.attrs``.
    """
    frame = pd.DataFrame(
        [[getattr(row, column) for column in COLUMNS] for row in table.rows],
        columns=list(COLUMNS),
    )
    frame["age_m"] = frame["age_m"].astype("float64")
    if table.provenance is not None:
        frame.attrs["provenance"] = {
            "criteria": table.provenance.criteria,
            "mirror_root": table.provenance.mirror_root,
            "created_at": table.provenance.created_at,
            "focus": table.provenance.focus,
        }
    return frame


def _value(value: Any) -> Any:
    return None if pd.isna(value) else value


def from_dataframe(frame: pd.DataFrame) -> IndexTable:
    """Build an index table from a DataFrame with the index columns.

    Raises:
        ValueError: If a column is missing.
    """
    missing = [column for column in COLUMNS if column not in frame.columns]
    if missing:
        raise ValueError(f"DataFrame lacks index column(s): {', '.join(missing)}.")

    rows: list[IndexRow] = []
    for record in frame[list(COLUMNS)].itertuples(index=False, name=None):
        values = {column: _value(v) for column, v in zip(COLUMNS, record, strict=True)}
        age = values["age_m"]
        rows.append(
            IndexRow(
                file_path=str(values["file_path"]),
                corpus=str(values["corpus"] or ""),
                participants=str(values["participants"] or ""),
                name=values["name"] or None,
                age_m=float(age) if age is not None else None,
                sex=values["sex"] or None,
                group=values["group"] or None,
                ses=values["ses"] or None,
                study_type=str(values["study_type"] or ""),
                participant_id=values["participant_id"] or None,
            )
        )

    stored = frame.attrs.get("provenance")
    provenance = Provenance(**stored) if isinstance(stored, dict) else None
    return IndexTable.from_rows(rows, provenance)
