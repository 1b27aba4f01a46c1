from .indexer import index_files, row_from_header
from .table import (
    COLUMNS,
    ColumnName,
    IndexRow,
    IndexTable,
    Provenance,
    check_column,
    read_index,
    write_index,
)

__all__ = [
    "COLUMNS",
    "ColumnName",
    "IndexRow",
    "IndexTable",
    "Provenance",
    "check_column",
    "index_files",
    "read_index",
    "row_from_header",
    "write_index",
]

try:
    from .pandas import from_dataframe, to_dataframe

    __all__.extend(["from_dataframe", "to_dataframe"])

except ModuleNotFoundError:
    pass
