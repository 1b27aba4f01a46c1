"""Tests for corpus archive helpers."""

import io
import zipfile

import pytest

from talkbank_harvest.harvest import (
    ArchiveError,
    check_member_paths,
    iter_chat_entries,
    read_header_block,
)
from talkbank_harvest.harvest.archive import open_archive
from tests.helpers import make_zip, plain_chat


def archive_of(entries) -> zipfile.ZipFile:
    return zipfile.ZipFile(io.BytesIO(make_zip(entries)))


class TestOpenArchive:
    """Tests for open_archive."""

    def test_corrupt(self):
        with pytest.raises(ArchiveError, match="Corrupt archive for corpus Bates"):
            open_archive(io.BytesIO(b"PK\x03\x04 truncated"), "Bates")


class TestIterChatEntries:
    """Tests for iter_chat_entries."""

    def test_only_chat_members_in_order(self):
        archive = archive_of(
            {
                "C/z.cha": "",
                "C/readme.txt": "",
                "C/sub/": "",
                "C/a.CHA": "",
                "C/media.mp3": b"\x00",
            }
        )
        assert [i.filename for i in iter_chat_entries(archive)] == ["C/z.cha", "C/a.CHA"]


class TestReadHeaderBlock:
    """Tests for read_header_block."""

    def test_reads_header_only(self):
        text = plain_chat("Bates", "Amy")
        archive = archive_of({"Bates/amy.cha": text})
        block = read_header_block(archive, archive.getinfo("Bates/amy.cha")).decode()

        assert block.startswith("@UTF8\n@Begin\n")
        assert "@Participants:\tCHI Amy Target_Child, MOT Mother\n" in block
        assert "*CHI" not in block
        assert "@End" not in block


class TestCheckMemberPaths:
    """Tests for check_member_paths."""

    @pytest.mark.parametrize(
        "name",
        ["../evil.cha", "C/../../evil.cha", "/etc/evil.cha", "C:/evil.cha", "C\\..\\evil.cha"],
    )
    def test_unsafe(self, name):
        archive = archive_of({"C/ok.cha": "", name: ""})
        with pytest.raises(ArchiveError, match="Unsafe member path"):
            check_member_paths(archive, "C")

    def test_safe(self):
        archive = archive_of({"C/ok.cha": "", "C/sub/x..y.cha": "", "C/.hidden": ""})
        check_member_paths(archive, "C")
