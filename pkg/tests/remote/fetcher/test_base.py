"""Tests for the PageFetcher interface."""

import io
import inspect

import pytest

from talkbank_harvest.remote import (
    FetchError,
    FetchResponse,
    PageFetcher,
    ProtectedCollectionError,
)
from tests.helpers import StaticFetcher


class TestPageFetcher:
    """Tests for the PageFetcher abstract base class."""

    def test_abstractmethods(self):
        """Tests that fetch is the only abstract method."""
        assert inspect.isabstract(PageFetcher)
        assert PageFetcher.__abstractmethods__ == frozenset({"fetch"})

    def test_default_download(self):
        fetcher = StaticFetcher({"http://x/a.zip": b"payload"})
        buffer = io.BytesIO()

        assert fetcher.download("http://x/a.zip", buffer) == 7
        assert buffer.getvalue() == b"payload"

    def test_default_download_raises_on_error_status(self):
        buffer = io.BytesIO()
        with pytest.raises(FetchError) as exc_info:
            StaticFetcher({}).download("http://x/missing.zip", buffer)
        assert exc_info.value.status == 404
        assert exc_info.value.url == "http://x/missing.zip"
        assert buffer.getvalue() == b""


class TestFetchResponse:
    """Tests for FetchResponse."""

    @pytest.mark.parametrize("status", [200, 204, 299])
    def test_ok(self, status):
        response = FetchResponse(url="http://x/", status=status)
        assert response.ok
        response.raise_for_status()

    def test_not_found(self):
        response = FetchResponse(url="http://x/", status=404)
        assert not response.ok
        with pytest.raises(FetchError, match="HTTP 404") as exc_info:
            response.raise_for_status()
        assert not isinstance(exc_info.value, ProtectedCollectionError)

    def test_unauthorized(self):
        with pytest.raises(ProtectedCollectionError, match="password protected"):
            FetchResponse(url="http://x/", status=401).raise_for_status()

    def test_authentication_challenge_header(self):
        response = FetchResponse(
            url="http://x/", status=403, headers={"www-authenticate": "Basic"}
        )
        with pytest.raises(ProtectedCollectionError):
            response.raise_for_status()

    def test_protected_is_fetch_error(self):
        assert issubclass(ProtectedCollectionError, FetchError)
