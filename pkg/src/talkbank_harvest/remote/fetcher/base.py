"""This module defines the page fetching interface used for all network
access."""

from abc import ABC, abstractmethod
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import BinaryIO


class FetchError(RuntimeError):
    """Raised when a URL can not be fetched.

    Attributes:
        url: The requested URL.
        status: HTTP status code, or None when no response was received.
    """

    def __init__(self, message: str, url: str, status: int | None = None) -> None:
        super().__init__(message)
        self.url = url
        self.status = status


class ProtectedCollectionError(FetchError):
    """Raised when the server asks for authentication.

    Only public collections can be harvested.
    """


@dataclass(frozen=True)
class FetchResponse:
    """Result of one GET request.

    Attributes:
        url: Final URL after redirects.
        status: HTTP status code.
        content: Response body.
        headers: Response headers.
    """

    url: str
    status: int
    content: bytes = b""
    headers: Mapping[str, str] = field(default_factory=dict[str, str])

    @property
    def ok(self) -> bool:
        return 200 <= self.status < 300

    def raise_for_status(self) -> None:
        """Raise unless the response is a success.

        Raises:
            ProtectedCollectionError: On an authentication challenge.
            FetchError: On any other non-success status.
        """
        challenged = any(key.lower() == "www-authenticate" for key in self.headers)
        if self.status == 401 or (challenged and not self.ok):
            raise ProtectedCollectionError(
                f"{self.url} is password protected (HTTP {self.status}); "
                "only public collections can be harvested.",
                self.url,
                self.status,
            )
        if not self.ok:
            raise FetchError(f"HTTP {self.status} for {self.url}", self.url, self.status)


class PageFetcher(ABC):
    """Abstract base class for HTTP GET access.

    Implementations must be safe to call from several threads at once.
    """

    @abstractmethod
    def fetch(self, url: str) -> FetchResponse:
        """Fetch a URL.

        Args:
            url: Absolute URL to GET.

        Returns:
            The response. Non-success statuses are returned, not raised.

        Raises:
            FetchError: If no response could be obtained.
        """
        ...

    def download(self, url: str, destination: BinaryIO) -> int:
        """Write the body of a successful GET to ``destination``.

        Args:
            url: Absolute URL to GET.
            destination: Binary file object receiving the body.

        Returns:
            Number of bytes written.

        Raises:
            FetchError: If the request fails or the status is not a success.
        """
        response = self.fetch(url)
        response.raise_for_status()
        destination.write(response.content)
        return len(response.content)
