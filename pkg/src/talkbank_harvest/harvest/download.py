"""This module downloads selected corpora into a local mirror.

The mirror is laid out as ``<root>/<collection>/<dataset>/<corpus>/`` and
keeps a ``manifest.json`` recording one entry per fetched corpus.
"""

import hashlib
import json
import logging
import shutil
import tempfile
import threading
import zipfile
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from datetime import UTC, datetime
from pathlib import Path
from typing import Any, Self

from ..remote import CorpusSource, PageFetcher
from .archive import ArchiveError, check_member_paths, iter_chat_entries, open_archive
from .retry import RetryPolicy, call_with_retry

MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return datetime.now(UTC).isoformat(timespec="seconds")


@dataclass(frozen=True)
class ManifestEntry:
    """Record of one fetched corpus.

    Attributes:
        archive_url: URL the archive was downloaded from.
        sha256: Hex digest of the archive bytes.
        size: Archive size in bytes.
        extraction_root: Mirror-relative extraction directory.
        fetched_at: ISO 8601 UTC timestamp of the last fetch or resume.
        file_count: Number of ``.cha`` entries in the archive.
    """

    archive_url: str
    sha256: str
    size: int
    extraction_root: str
    fetched_at: str
    file_count: int


class Manifest:
    """Thread-safe record of the corpora present in a mirror.

    Every update is written through to ``path`` immediately.

    Examples:
        >>> manifest = Manifest.load(mirror / "manifest.json")  # doctest: +SKIP
        >>> manifest.get("childes/Eng-NA/Bates")  # doctest: +SKIP
    """

    def __init__(self, path: Path, entries: dict[str, ManifestEntry] | None = None) -> None:
        self.path = path
        self._entries = dict(entries or {})
        self._lock = threading.Lock()
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @classmethod
    def load(cls, path: Path) -> Self:
        """Load a manifest, or start an empty one if ``path`` does not
        exist.

        Raises:
            ValueError: If the file is not a valid manifest.
        """
        if not path.exists():
            return cls(path)
        try:
            raw: dict[str, dict[str, Any]] = json.loads(path.read_text(encoding="utf-8"))
            entries = {key: ManifestEntry(**value) for key, value in raw.items()}
        except (json.JSONDecodeError, TypeError, AttributeError) as e:
            raise ValueError(f"Invalid manifest {path}: {e}") from e
        return cls(path, entries)

    @property
    def root(self) -> Path:
        return self.path.parent

    @property
    def entries(self) -> dict[str, ManifestEntry]:
        with self._lock:
            return dict(self._entries)

    def get(self, key: str) -> ManifestEntry | None:
        with self._lock:
            return self._entries.get(key)

    def record(self, key: str, entry: ManifestEntry) -> None:
        with self._lock:
            self._entries[key] = entry
            self._save()

    def touch(self, key: str) -> None:
        """Refresh the timestamp of an existing entry."""
        with self._lock:
            self._entries[key] = replace(self._entries[key], fetched_at=_now())
            self._save()

    def _save(self) -> None:
        data = {key: asdict(entry) for key, entry in self._entries.items()}
        self.path.parent.mkdir(parents=True, exist_ok=True)
        staging = self.path.with_name(f".{self.path.name}.tmp")
        staging.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        staging.replace(self.path)


def extraction_root(source: CorpusSource, dest_root: Path) -> Path:
    """Directory that holds the extracted files of ``source``."""
    return dest_root.joinpath(source.collection, *source.dataset.split("/"), source.corpus)


def _extract(archive: zipfile.ZipFile, target: Path, corpus: str) -> None:
    """Extract into a staging directory, then swap it in for ``target``.

    On failure ``target`` is left as it was.
    """
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{corpus}-", dir=target.parent))
    previous = staging.with_name(f"{staging.name}-previous")
    try:
        archive.extractall(staging)
        if target.exists():
            target.rename(previous)
        staging.rename(target)
    except (OSError, zipfile.BadZipFile) as e:
        if previous.exists() and not target.exists():
            previous.rename(target)
        shutil.rmtree(staging, ignore_errors=True)
        raise ArchiveError(f"Failed to extract corpus {corpus} into {target}: {e}") from e
    shutil.rmtree(previous, ignore_errors=True)


def fetch_corpus(
    source: CorpusSource,
    dest_root: Path,
    fetcher: PageFetcher,
    manifest: Manifest,
    *,
    retry: RetryPolicy = RetryPolicy(),
    revalidate: bool = False,
) -> Path:
    """Download and extract one corpus into the mirror.

    A corpus already recorded in the manifest under the same archive URL
    whose extraction root exists is not downloaded again; only its
    timestamp is refreshed. With ``revalidate`` the archive is downloaded
    and extraction is skipped only if its digest is unchanged.

    Args:
        source: The corpus to fetch.
        dest_root: Mirror root directory.
        fetcher: The page fetcher.
        manifest: Manifest of the mirror.
        retry: Retry policy for the download.
        revalidate: Whether to compare digests instead of trusting the
            manifest.

    Returns:
        The extraction root of the corpus.

    Raises:
        FetchError: If the download fails after all retries.
        ArchiveError: If the archive is corrupt, contains unsafe member
            paths or can not be extracted. The manifest entry and any
            earlier extraction are then left unchanged.
    """
    logger = logging.getLogger(__name__)
    target = extraction_root(source, dest_root)
    prefix = f"step=fetch corpus={source.corpus}"

    entry = manifest.get(source.key)
    if (
        entry is not None
        and entry.archive_url == source.archive_url
        and target.is_dir()
        and not revalidate
    ):
        manifest.touch(source.key)
        logger.info(f"{prefix}: already in mirror, skipped")
        return target

    with tempfile.TemporaryFile() as buffer:

        def download() -> int:
            buffer.seek(0)
            buffer.truncate()
            return fetcher.download(source.archive_url, buffer)

        size = call_with_retry(download, retry, f"{prefix}: download", logger)
        buffer.seek(0)
        digest = hashlib.file_digest(buffer, "sha256").hexdigest()

        if entry is not None and entry.sha256 == digest and target.is_dir():
            manifest.touch(source.key)
            logger.info(f"{prefix}: digest unchanged, extraction skipped")
            return target

        buffer.seek(0)
        with open_archive(buffer, source.corpus) as archive:
            check_member_paths(archive, source.corpus)
            file_count = sum(1 for _ in iter_chat_entries(archive))
            _extract(archive, target, source.corpus)
        manifest.record(
            source.key,
            ManifestEntry(
                archive_url=source.archive_url,
                sha256=digest,
                size=size,
                extraction_root=target.relative_to(dest_root).as_posix(),
                fetched_at=_now(),
                file_count=file_count,
            ),
        )

    logger.info(f"{prefix}: extracted {file_count} CHAT file(s), {size} bytes")
    return target


def fetch_corpora(
    sources: Sequence[CorpusSource],
    dest_root: Path,
    fetcher: PageFetcher,
    manifest: Manifest,
    parallelism: int = 1,
    *,
    retry: RetryPolicy = RetryPolicy(),
    revalidate: bool = False,
) -> list[Path]:
    """Fetch several corpora concurrently.

    Returns:
        Extraction roots in the order of ``sources``.

    Raises:
        ValueError: If parallelism is less than 1.
        FetchError: The first download failure, in source order.
        ArchiveError: The first archive failure, in source order.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}.")

    def fetch_one(source: CorpusSource) -> Path:
        return fetch_corpus(
            source, dest_root, fetcher, manifest, retry=retry, revalidate=revalidate
        )

    with ThreadPoolExecutor(max_workers=parallelism) as executor:
        return list(executor.map(fetch_one, sources))
