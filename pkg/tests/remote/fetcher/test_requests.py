"""Tests for the requests-based PageFetcher, against a local stub
server."""

import io

import pytest
import requests
from pytest_mock import MockerFixture

from talkbank_harvest.remote import (
    FetchError,
    ProtectedCollectionError,
    RequestsPageFetcher,
)


class TestRequestsPageFetcher:
    """Tests for RequestsPageFetcher."""

    @pytest.fixture
    def fetcher(self):
        return RequestsPageFetcher(timeout=5.0, chunk_size=4)

    def test_fetch(self, fetcher, stub_server):
        (stub_server.root / "page.html").write_bytes(b"<a href='x.zip'>x</a>")

        response = fetcher.fetch(f"{stub_server.url}/page.html")

        assert response.status == 200
        assert response.ok
        assert response.content == b"<a href='x.zip'>x</a>"
        assert response.url == f"{stub_server.url}/page.html"

    def test_fetch_follows_directory_redirect(self, fetcher, stub_server):
        (stub_server.root / "data").mkdir()

        response = fetcher.fetch(f"{stub_server.url}/data")

        assert response.status == 200
        assert response.url.endswith("/data/")

    def test_missing_page_is_returned_not_raised(self, fetcher, stub_server):
        response = fetcher.fetch(f"{stub_server.url}/nothing.html")
        assert response.status == 404
        with pytest.raises(FetchError):
            response.raise_for_status()

    def test_protected(self, fetcher, stub_server):
        response = fetcher.fetch(f"{stub_server.url}/protected/data/")
        assert response.status == 401
        with pytest.raises(ProtectedCollectionError):
            response.raise_for_status()

    def test_connection_error(self, fetcher, mocker: MockerFixture):
        mocker.patch.object(
            requests.Session, "get", side_effect=requests.ConnectionError("refused")
        )
        with pytest.raises(FetchError, match="refused") as exc_info:
            fetcher.fetch("http://127.0.0.1:9/")
        assert exc_info.value.status is None

    def test_user_agent(self, fetcher):
        assert fetcher._session().headers["User-Agent"].startswith("talkbank-harvest/")

    def test_download_streams(self, fetcher, stub_server):
        payload = bytes(range(256)) * 10
        (stub_server.root / "corpus.zip").write_bytes(payload)
        buffer = io.BytesIO()

        written = fetcher.download(f"{stub_server.url}/corpus.zip", buffer)

        assert written == len(payload)
        assert buffer.getvalue() == payload

    def test_download_error_status(self, fetcher, stub_server):
        buffer = io.BytesIO()
        with pytest.raises(FetchError) as exc_info:
            fetcher.download(f"{stub_server.url}/missing.zip", buffer)
        assert exc_info.value.status == 404
        assert buffer.getvalue() == b""

    def test_download_protected(self, fetcher, stub_server):
        with pytest.raises(ProtectedCollectionError):
            fetcher.download(f"{stub_server.url}/protected/a.zip", io.BytesIO())
