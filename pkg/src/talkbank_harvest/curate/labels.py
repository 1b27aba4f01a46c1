"""Label inventory of index table columns."""

from ..index import IndexTable, check_column


def get_labels(table: IndexTable, column: str) -> list[str]:
    """Distinct non-missing values of a column, sorted lexicographically.

    Raises:
        ValueError: If ``column`` is not an index column.

    Examples:
        >>> get_labels(IndexTable(), "group")
        []
    """
    return sorted({value for value in table.column(check_column(column)) if value is not None})


def count_missing(table: IndexTable, column: str) -> int:
    """Number of rows whose ``column`` value is missing."""
    return sum(1 for value in table.column(check_column(column)) if value is None)
