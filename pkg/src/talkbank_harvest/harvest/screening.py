"""This module screens remote corpora for relevance.

Screening stops at the first file of a corpus that satisfies the
criteria and never writes archives to disk.
"""

import io
import logging
import zipfile
import zlib
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from ..chat import HeaderParseError, ParseMode, parse_header
from ..criteria import FilterExpr, eval_expr
from ..remote import CorpusSource, FetchError, PageFetcher
from .archive import ArchiveError, iter_chat_entries, open_archive, read_header_block
from .retry import RetryPolicy, call_with_retry


class ScreeningError(RuntimeError):
    """Raised when every corpus of a dataset failed screening."""


@dataclass(frozen=True)
class ScreenResult:
    """Outcome of screening one corpus.

    Attributes:
        source: The screened corpus.
        selected: Whether some file satisfied the criteria.
        files_inspected: Number of ``.cha`` entries examined.
        first_match: Archive path of the first matching file.
        warnings: Entries that could not be read or parsed.
        error: Why the corpus could not be screened at all, if it failed.
    """

    source: CorpusSource
    selected: bool
    files_inspected: int
    first_match: str | None = None
    warnings: tuple[str, ...] = ()
    error: str | None = None

    def __post_init__(self) -> None:
        if self.selected != (self.first_match is not None):
            raise ValueError("selected must be True exactly when first_match is set.")

    def to_dict(self) -> dict[str, Any]:
        return {
            "collection": self.source.collection,
            "dataset": self.source.dataset,
            "corpus": self.source.corpus,
            "archive_url": self.source.archive_url,
            "selected": self.selected,
            "files_inspected": self.files_inspected,
            "first_match": self.first_match,
            "warnings": list(self.warnings),
            "error": self.error,
        }


def _fetch_archive(
    source: CorpusSource,
    fetcher: PageFetcher,
    retry: RetryPolicy,
    logger: logging.Logger,
) -> bytes:
    def fetch() -> bytes:
        response = fetcher.fetch(source.archive_url)
        response.raise_for_status()
        return response.content

    return call_with_retry(
        fetch, retry, f"step=screen corpus={source.corpus}: download", logger
    )


def screen_corpus(
    source: CorpusSource,
    criteria: FilterExpr,
    fetcher: PageFetcher,
    *,
    mode: ParseMode = ParseMode.LENIENT,
    retry: RetryPolicy = RetryPolicy(),
) -> ScreenResult:
    """Screen one corpus, stopping at the first matching file.

    ``.cha`` entries are visited in central-directory order and only their
    header blocks are decoded. Non-``.cha`` members are neither inspected
    nor counted.

    Args:
        source: The corpus to screen.
        criteria: The screening criteria.
        fetcher: The page fetcher used to get the archive.
        mode: Header parsing mode. Entries failing to parse are skipped.
        retry: Retry policy for the archive download.

    Returns:
        The screening result.

    Raises:
        ArchiveError: If the archive is corrupt.
        FetchError: If the archive can not be downloaded.
    """
    logger = logging.getLogger(__name__)
    content = _fetch_archive(source, fetcher, retry, logger)

    warnings: list[str] = []
    inspected = 0
    with open_archive(io.BytesIO(content), source.corpus) as archive:
        for info in iter_chat_entries(archive):
            inspected += 1
            try:
                header = parse_header(
                    read_header_block(archive, info),
                    mode,
                    file_path=info.filename,
                    corpus=source.corpus,
                )
            except (
                HeaderParseError,
                zipfile.BadZipFile,
                zlib.error,
                OSError,
                RuntimeError,
                NotImplementedError,
            ) as e:
                warnings.append(f"{info.filename}: {e}")
                logger.warning(
                    f"step=screen corpus={source.corpus} file={info.filename}: skipped ({e})"
                )
                continue

            if eval_expr(criteria, header):
                logger.info(
                    f"step=screen corpus={source.corpus} file={info.filename}: "
                    f"selected after {inspected} file(s)"
                )
                return ScreenResult(
                    source=source,
                    selected=True,
                    files_inspected=inspected,
                    first_match=info.filename,
                    warnings=tuple(warnings),
                )

    logger.info(
        f"step=screen corpus={source.corpus}: not selected ({inspected} file(s) inspected)"
    )
    return ScreenResult(
        source=source, selected=False, files_inspected=inspected, warnings=tuple(warnings)
    )


def screen_dataset(
    sources: Sequence[CorpusSource],
    criteria: FilterExpr,
    fetcher: PageFetcher,
    parallelism: int = 1,
    *,
    mode: ParseMode = ParseMode.LENIENT,
    retry: RetryPolicy = RetryPolicy(),
) -> list[ScreenResult]:
    """Screen every corpus of a dataset.

    Failures of single corpora are recorded in their result's ``error``
    instead of aborting the run.

    Args:
        sources: Corpora to screen.
        criteria: The screening criteria.
        fetcher: The page fetcher.
        parallelism: Number of corpora screened concurrently.
        mode: Header parsing mode.
        retry: Retry policy for archive downloads.

    Returns:
        Results sorted by corpus name, independent of completion order.

    Raises:
        ValueError: If parallelism is less than 1.
        ScreeningError: If every corpus failed.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}.")
    if not sources:
        return []
    logger = logging.getLogger(__name__)

    def screen_one(source: CorpusSource) -> ScreenResult:
        try:
            return screen_corpus(source, criteria, fetcher, mode=mode, retry=retry)
        except (FetchError, ArchiveError) as e:
            logger.error(f"step=screen corpus={source.corpus}: failed ({e})")
            return ScreenResult(source=source, selected=False, files_inspected=0, error=str(e))

    with ThreadPoolExecutor(max_workers=parallelism) as executor:
        results = list(executor.map(screen_one, sources))

    results.sort(key=lambda r: (r.source.corpus, r.source.archive_url))
    if all(r.error is not None for r in results):
        raise ScreeningError(f"All {len(results)} corpora failed screening.")
    return results
