from .base import FetchError, FetchResponse, PageFetcher, ProtectedCollectionError
from .requests import RequestsPageFetcher

__all__ = [
    "FetchError",
    "FetchResponse",
    "PageFetcher",
    "ProtectedCollectionError",
    "RequestsPageFetcher",
]
