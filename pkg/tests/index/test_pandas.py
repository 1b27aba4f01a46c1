"""Tests for the pandas conversion of index tables."""

import math

import pytest

pd = pytest.importorskip("pandas")

from talkbank_harvest.index import IndexRow, IndexTable, Provenance
from talkbank_harvest.index.pandas import from_dataframe, to_dataframe

ROWS = [
    IndexRow("b/amy.cha", "Bates", "CHI, MOT", "Target_Child", 20.0, "female", "TD", "MC", "cross"),
    IndexRow("h/x.cha", "HSLLD", "MOT", study_type="long, home"),
]
PROVENANCE = Provenance("exists(CHI)", "/mirror", "2026-10-17T00:00:00+00:00")


class TestToDataframe:
    """Tests for to_dataframe."""

    def test_columns_and_values(self):
        frame = to_dataframe(IndexTable.from_rows(ROWS, PROVENANCE))

        assert list(frame.columns) == list(IndexTable().columns)
        assert frame["age_m"].dtype == "float64"
        assert frame.loc[0, "name"] == "Target_Child"
        assert math.isnan(frame.loc[1, "age_m"])
        assert frame.attrs["provenance"]["criteria"] == "exists(CHI)"

    def test_empty(self):
        frame = to_dataframe(IndexTable())
        assert len(frame) == 0
        assert "provenance" not in frame.attrs


class TestFromDataframe:
    """Tests for from_dataframe."""

    def test_round_trip(self):
        table = IndexTable.from_rows(ROWS, PROVENANCE)
        assert from_dataframe(to_dataframe(table)) == table

    def test_missing_column(self):
        frame = to_dataframe(IndexTable.from_rows(ROWS)).drop(columns=["ses"])
        with pytest.raises(ValueError, match="ses"):
            from_dataframe(frame)
