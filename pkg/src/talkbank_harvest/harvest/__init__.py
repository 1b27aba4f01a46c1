from .archive import ArchiveError, check_member_paths, iter_chat_entries, read_header_block
from .download import (
    MANIFEST_NAME,
    Manifest,
    ManifestEntry,
    extraction_root,
    fetch_corpora,
    fetch_corpus,
)
from .retry import RetryPolicy, call_with_retry
from .screening import ScreeningError, ScreenResult, screen_corpus, screen_dataset

__all__ = [
    "ArchiveError",
    "MANIFEST_NAME",
    "Manifest",
    "ManifestEntry",
    "RetryPolicy",
    "ScreenResult",
    "ScreeningError",
    "call_with_retry",
    "check_member_paths",
    "extraction_root",
    "fetch_corpora",
    "fetch_corpus",
    "iter_chat_entries",
    "read_header_block",
    "screen_corpus",
    "screen_dataset",
]
