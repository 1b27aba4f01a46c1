from .fetcher import (
    FetchError,
    FetchResponse,
    PageFetcher,
    ProtectedCollectionError,
    RequestsPageFetcher,
)
from .source import CorpusSource, dataset_url, scan_zip_urls

__all__ = [
    "CorpusSource",
    "FetchError",
    "FetchResponse",
    "PageFetcher",
    "ProtectedCollectionError",
    "RequestsPageFetcher",
    "dataset_url",
    "scan_zip_urls",
]
