"""This module provides a requests-based PageFetcher."""

import logging
import threading
from typing import BinaryIO, override

import requests

from ... import __version__
from .base import FetchError, FetchResponse, PageFetcher

DEFAULT_USER_AGENT = f"talkbank-harvest/{__version__}"


class RequestsPageFetcher(PageFetcher):
    """PageFetcher implementation using the requests library.

    Each thread gets its own ``requests.Session``.

    Examples:
        >>> fetcher = RequestsPageFetcher(timeout=10.0)
        >>> response = fetcher.fetch("https://childes.talkbank.org/data/Eng-NA/")  # doctest: +SKIP
        >>> response.raise_for_status()  # doctest: +SKIP
    """

    def __init__(
        self,
        timeout: float = 30.0,
        max_redirects: int = 5,
        user_agent: str = DEFAULT_USER_AGENT,
        chunk_size: int = 1 << 20,
    ) -> None:
        """Initializes an instance of RequestsPageFetcher.

        Args:
            timeout: Request timeout in seconds.
            max_redirects: Maximum number of redirects to follow.
            user_agent: User-Agent header sent with every request.
            chunk_size: Chunk size in bytes used when streaming downloads.
        """
        self.timeout = timeout
        self.max_redirects = max_redirects
        self.user_agent = user_agent
        self.chunk_size = chunk_size
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")
        self._local = threading.local()

    def _session(self) -> requests.Session:
        session: requests.Session | None = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            session.headers["User-Agent"] = self.user_agent
            session.max_redirects = self.max_redirects
            self._local.session = session
        return session

    def _get(self, url: str, stream: bool) -> requests.Response:
        try:
            return self._session().get(url, timeout=self.timeout, stream=stream)
        except requests.RequestException as e:
            raise FetchError(f"Failed to fetch {url}: {e}", url) from e

    @override
    def fetch(self, url: str) -> FetchResponse:
        response = self._get(url, stream=False)
        self.logger.debug(
            f"GET {url} -> {response.status_code} ({len(response.content)} bytes)"
        )
        return FetchResponse(
            url=response.url,
            status=response.status_code,
            content=response.content,
            headers=dict(response.headers),
        )

    @override
    def download(self, url: str, destination: BinaryIO) -> int:
        with self._get(url, stream=True) as response:
            FetchResponse(
                url=response.url,
                status=response.status_code,
                headers=dict(response.headers),
            ).raise_for_status()
            written = 0
            try:
                for chunk in response.iter_content(chunk_size=self.chunk_size):
                    destination.write(chunk)
                    written += len(chunk)
            except requests.RequestException as e:
                raise FetchError(f"Download of {url} interrupted: {e}", url) from e
        self.logger.debug(f"GET {url} -> {written} bytes streamed")
        return written
