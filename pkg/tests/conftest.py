"""Shared fixtures, most notably an offline stand-in for a TalkBank server."""

import threading
from collections.abc import Iterator
from functools import partial
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from tests.helpers import fixture_corpora, write_site


class _StubHandler(SimpleHTTPRequestHandler):
    """Static file handler with auto-generated directory listings.

    Everything below ``/protected/`` answers with an authentication
    challenge.
    """

    def do_GET(self) -> None:
        if self.path.startswith("/protected/"):
            self.send_response(401)
            self.send_header("WWW-Authenticate", 'Basic realm="TalkBank"')
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        super().do_GET()

    def log_message(self, format: str, *args: object) -> None:
        pass


class StubServer:
    """Threaded HTTP server serving ``root`` on a free local port."""

    def __init__(self, root: Path) -> None:
        self.root = root
        self.root.mkdir(parents=True, exist_ok=True)
        handler = partial(_StubHandler, directory=str(root))
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def host(self) -> str:
        """``host:port``, usable as a base host override."""
        return f"127.0.0.1:{self.httpd.server_address[1]}"

    @property
    def url(self) -> str:
        return f"http://{self.host}"

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        self.thread.join()


@pytest.fixture
def stub_server(tmp_path: Path) -> Iterator[StubServer]:
    """A local HTTP server serving an initially empty directory."""
    server = StubServer(tmp_path / "www")
    yield server
    server.close()


@pytest.fixture
def corpus_site(stub_server: StubServer) -> StubServer:
    """Stub server hosting ``childes/data/Eng-NA`` with the five fixture
    corpora."""
    write_site(stub_server.root, fixture_corpora())
    return stub_server
