"""Tests for the index table and its CSV form."""

import json

import pytest
from pytest_mock import MockerFixture

from talkbank_harvest.index import (
    COLUMNS,
    IndexRow,
    IndexTable,
    Provenance,
    check_column,
    read_index,
    write_index,
)
from talkbank_harvest.index.table import provenance_path

HEADER = b"file_path,corpus,participants,name,age_m,sex,group,ses,study_type,participant_id\r\n"

AMY = IndexRow(
    file_path="childes/Eng-NA/Bates/Free20/amy.cha",
    corpus="Bates",
    participants="CHI, MOT",
    name="Target_Child",
    age_m=20.0,
    sex="female",
    group="TD",
    ses="MC",
    study_type="cross, toyplay, TD",
)
BETTY = IndexRow(
    file_path="childes/Eng-NA/Bates/Free20/betty.cha",
    corpus="Bates",
    participants="CHI, MOT",
    name="Betty",
    age_m=20.0,
    sex="female",
    group="TD",
    ses="MC",
    study_type="cross, toyplay, TD",
)
ODD = IndexRow(
    file_path="childes/Eng-NA/Brown/adam.cha",
    corpus="Brown",
    participants="CHI",
    name='Adam "A"',
    age_m=27.0625,
)
PROVENANCE = Provenance(
    criteria="exists(CHI)",
    mirror_root="/data/mirror",
    created_at="2026-10-17T00:00:00+00:00",
)


class TestIndexRow:
    """Tests for IndexRow."""

    def test_get(self):
        assert AMY.get("age_m") == "20.0"
        assert AMY.get("participant_id") is None
        assert AMY.participant_codes == ("CHI", "MOT")

    def test_unknown_column(self):
        with pytest.raises(ValueError, match="Unknown column 'shoe'"):
            AMY.get("shoe")

    @pytest.mark.parametrize("field", ["name", "sex", "group", "ses", "participant_id"])
    def test_empty_string_is_rejected(self, field):
        with pytest.raises(ValueError, match="must be None"):
            IndexRow("x.cha", "C", "CHI", **{field: ""})

    def test_empty_path(self):
        with pytest.raises(ValueError):
            IndexRow("", "C", "CHI")

    def test_record(self):
        assert IndexRow.from_record(AMY.to_record()) == AMY
        assert IndexRow("x.cha", "C", "").to_record() == ["x.cha", "C"] + [""] * 8

    def test_record_length(self):
        with pytest.raises(ValueError, match="Expected 10 fields"):
            IndexRow.from_record(["x.cha", "C"])


class TestIndexTable:
    """Tests for IndexTable invariants."""

    def test_from_rows_sorts(self):
        table = IndexTable.from_rows([ODD, BETTY, AMY])
        assert [row.name for row in table] == ["Target_Child", "Betty", 'Adam "A"']
        assert len(table) == 3
        assert table.columns == COLUMNS

    def test_unsorted_rows(self):
        with pytest.raises(ValueError, match="sorted"):
            IndexTable((BETTY, AMY))

    def test_duplicate_paths(self):
        with pytest.raises(ValueError, match="unique"):
            IndexTable.from_rows([AMY, AMY])

    def test_column(self):
        table = IndexTable.from_rows([AMY, ODD])
        assert table.column("age_m") == ["20.0", "27.1"]
        assert table.column("ses") == ["MC", None]

    def test_with_rows_keeps_provenance(self):
        table = IndexTable.from_rows([AMY], PROVENANCE, ["first"])
        updated = table.with_rows([ODD, BETTY], ["second"])
        assert updated.provenance == PROVENANCE
        assert updated.warnings == ("first", "second")
        assert [row.file_path for row in updated] == [BETTY.file_path, ODD.file_path]

    def test_check_column(self):
        assert check_column("ses") == "ses"
        with pytest.raises(ValueError):
            check_column("SES")


class TestWriteIndex:
    """Tests for the CSV serialization."""

    def test_bytes(self, tmp_path):
        path = write_index(IndexTable.from_rows([AMY, ODD]), tmp_path / "index.csv")

        assert path.read_bytes() == (
            HEADER
            + b'childes/Eng-NA/Bates/Free20/amy.cha,Bates,"CHI, MOT",Target_Child,'
            + b'20.0,female,TD,MC,"cross, toyplay, TD",\r\n'
            + b'childes/Eng-NA/Brown/adam.cha,Brown,CHI,"Adam ""A""",27.1,,,,,\r\n'
        )

    def test_empty_table(self, tmp_path):
        path = write_index(IndexTable(), tmp_path / "out" / "index.csv")
        assert path.read_bytes() == HEADER
        assert not provenance_path(path).exists()

    def test_unicode(self, tmp_path):
        row = IndexRow("x/zoë.cha", "Français", "CHI", name="Zoë")
        path = write_index(IndexTable((row,)), tmp_path / "index.csv")
        assert "Zoë" in path.read_text(encoding="utf-8")

    def test_provenance_sidecar(self, tmp_path):
        path = write_index(IndexTable.from_rows([AMY], PROVENANCE), tmp_path / "index.csv")
        sidecar = json.loads(provenance_path(path).read_text())
        assert sidecar["criteria"] == "exists(CHI)"
        assert sidecar["focus"] == "CHI"
        assert sidecar["rows"] == 1
        assert sidecar["columns"] == list(COLUMNS)

    def test_interrupted_write_keeps_previous_file(self, tmp_path, mocker: MockerFixture):
        path = write_index(IndexTable.from_rows([AMY]), tmp_path / "index.csv")
        before = path.read_bytes()
        mocker.patch.object(IndexRow, "to_record", side_effect=RuntimeError("interrupted"))

        with pytest.raises(RuntimeError, match="interrupted"):
            write_index(IndexTable.from_rows([AMY, BETTY]), path)

        assert path.read_bytes() == before
        assert sorted(p.name for p in tmp_path.iterdir()) == ["index.csv"]


class TestReadIndex:
    """Tests for read_index."""

    def test_round_trip(self, tmp_path):
        table = IndexTable.from_rows([AMY, BETTY, ODD], PROVENANCE)
        loaded = read_index(write_index(table, tmp_path / "index.csv"))

        assert loaded.provenance == PROVENANCE
        assert [row.to_record() for row in loaded] == [row.to_record() for row in table]
        assert loaded.rows[0] == AMY

    def test_rewrite_is_byte_identical(self, tmp_path):
        first = write_index(IndexTable.from_rows([AMY, ODD]), tmp_path / "a.csv")
        second = write_index(read_index(first), tmp_path / "b.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_wrong_header(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b,c\r\n1,2,3\r\n")
        with pytest.raises(ValueError, match="not an index table"):
            read_index(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            read_index(path)
