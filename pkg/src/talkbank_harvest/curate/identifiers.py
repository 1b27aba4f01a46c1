import logging
from dataclasses import replace

from ..chat import STANDARD_ROLES
from ..index import IndexRow, IndexTable


def add_participant_id(table: IndexTable, separator: str = "/") -> IndexTable:
    """Fill ``participant_id`` with ``<corpus><separator><name>``.

    Rows of the same corpus naming the same participant share an id, so
    longitudinal recordings map to one participant. Rows without a name, or
    whose name is only a role label such as ``Target_Child``, get no id and
    a warning in the returned table.

    Args:
        table: The index table.
        separator: Text placed between corpus and name.

    Returns:
        A new table with identifiers filled.

    Raises:
        ValueError: If the separator is empty.
    """
    if not separator:
        raise ValueError("separator must not be empty.")
    logger = logging.getLogger(__name__)

    rows: list[IndexRow] = []
    warnings: list[str] = []
    for row in table.rows:
        if row.name is None or row.name in STANDARD_ROLES:
            reason = "no participant name" if row.name is None else f"name is the role {row.name}"
            warnings.append(f"{row.file_path}: {reason}, id left missing")
            logger.warning(
                f"step=normalize corpus={row.corpus} file={row.file_path}: "
                f"{reason}, id left missing"
            )
            rows.append(replace(row, participant_id=None))
            continue
        if separator in row.corpus:
            logger.warning(
                f"step=normalize corpus={row.corpus}: corpus name contains the "
                f"id separator {separator!r}"
            )
        rows.append(replace(row, participant_id=f"{row.corpus}{separator}{row.name}"))
    return table.with_rows(rows, warnings)
