"""Helpers for reading corpus zip archives."""

import re
import zipfile
from collections.abc import Iterator
from pathlib import PurePosixPath
from typing import IO

from ..chat import take_header_block

_DRIVE = re.compile(r"^[A-Za-z]:")


class ArchiveError(RuntimeError):
    """Raised when a corpus archive is corrupt or unsafe to extract."""


def open_archive(file: IO[bytes], corpus: str) -> zipfile.ZipFile:
    """Open a corpus archive.

    Raises:
        ArchiveError: If the data is not a readable zip archive.
    """
    try:
        return zipfile.ZipFile(file)
    except (zipfile.BadZipFile, OSError) as e:
        raise ArchiveError(f"Corrupt archive for corpus {corpus}: {e}") from e


def iter_chat_entries(archive: zipfile.ZipFile) -> Iterator[zipfile.ZipInfo]:
    """Yield the ``.cha`` members in central-directory order."""
    for info in archive.infolist():
        if not info.is_dir() and info.filename.lower().endswith(".cha"):
            yield info


def read_header_block(archive: zipfile.ZipFile, info: zipfile.ZipInfo) -> bytes:
    """Read an entry only up to the end of its header block.

    Header lines start with ``@``; tab-indented lines continue them.
    """
    with archive.open(info) as entry:
        return take_header_block(entry)


def check_member_paths(archive: zipfile.ZipFile, corpus: str) -> None:
    """Reject archives whose members would land outside the extraction root.

    Raises:
        ArchiveError: On absolute paths, drive letters or ``..`` components.
    """
    for info in archive.infolist():
        name = info.filename.replace("\\", "/")
        if name.startswith("/") or _DRIVE.match(name) or ".." in PurePosixPath(name).parts:
            raise ArchiveError(
                f"Unsafe member path {info.filename!r} in archive of corpus {corpus}"
            )
