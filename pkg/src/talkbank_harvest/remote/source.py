"""This module locates downloadable corpus archives on a TalkBank-style
server.

Collections are laid out as ``<collection>/data/<dataset>/<Corpus>.zip``.
"""

import logging
import posixpath
import re
from dataclasses import dataclass
from urllib.parse import unquote, urljoin, urlparse, urlunparse

from bs4 import BeautifulSoup

from .fetcher import PageFetcher

_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


@dataclass(frozen=True)
class CorpusSource:
    """A remote corpus archive.

    Attributes:
        collection: Collection name, e.g. ``childes``.
        dataset: Dataset path below ``data/``, e.g. ``Eng-NA``. Nested
            datasets use ``/`` separators.
        corpus: Archive basename without ``.zip``.
        archive_url: Absolute URL of the archive.
    """

    collection: str
    dataset: str
    corpus: str
    archive_url: str

    def __post_init__(self) -> None:
        path = urlparse(self.archive_url).path
        if not path.endswith(".zip"):
            raise ValueError(f"Archive URL must end with .zip: {self.archive_url}")
        if not self.corpus or unquote(posixpath.basename(path))[: -len(".zip")] != self.corpus:
            raise ValueError(
                f"Corpus name {self.corpus!r} does not match archive URL {self.archive_url}"
            )

    @property
    def key(self) -> str:
        """Mirror-relative location, ``<collection>/<dataset>/<corpus>``."""
        return f"{self.collection}/{self.dataset}/{self.corpus}"


def _check_name(kind: str, name: str) -> None:
    if not _NAME.fullmatch(name):
        raise ValueError(
            f"Invalid {kind} name {name!r}: use letters, digits, '.', '_' or '-'."
        )


def dataset_url(collection: str, dataset: str, base_host: str | None = None) -> str:
    """Build the URL of a dataset directory.

    Args:
        collection: Collection name, e.g. ``childes``.
        dataset: Dataset name, e.g. ``Eng-NA``.
        base_host: Optional host (``localhost:8080`` or a full
            ``http://...`` origin) serving every collection under
            ``/<collection>/data``. Without it the public
            ``https://<collection>.talkbank.org`` host is used.

    Returns:
        The dataset URL.

    Raises:
        ValueError: If a name is empty or contains path separators.

    Examples:
        >>> dataset_url("childes", "Eng-NA")
        'https://childes.talkbank.org/data/Eng-NA'
        >>> dataset_url("asdbank", "English", base_host="localhost:8080")
        'http://localhost:8080/asdbank/data/English'
    """
    _check_name("collection", collection)
    _check_name("dataset", dataset)
    if not base_host:
        return f"https://{collection}.talkbank.org/data/{dataset}"
    origin = base_host.rstrip("/")
    if "://" not in origin:
        origin = f"http://{origin}"
    return f"{origin}/{collection}/data/{dataset}"


def _infer_location(url: str) -> tuple[str, str]:
    parsed = urlparse(url)
    segments = [unquote(s) for s in parsed.path.split("/") if s]
    host_label = (parsed.hostname or "").split(".")[0]
    if "data" in segments:
        index = segments.index("data")
        collection = segments[index - 1] if index > 0 else host_label
        return collection, "/".join(segments[index + 1 :])
    return host_label, segments[-1] if segments else ""


def _directory_url(url: str) -> str:
    return url if url.endswith("/") else f"{url}/"


def scan_zip_urls(
    url: str,
    fetcher: PageFetcher,
    *,
    collection: str | None = None,
    dataset: str | None = None,
    max_depth: int = 1,
) -> list[CorpusSource]:
    """Scan a dataset directory listing for corpus archives.

    Every ``href`` ending in ``.zip`` on the listing's host becomes a
    CorpusSource. Links to subdirectories are followed up to ``max_depth``
    levels; their archives belong to the nested dataset ``<dataset>/<sub>``.

    Args:
        url: Dataset URL, e.g. from :func:`dataset_url`.
        fetcher: The page fetcher.
        collection: Collection name. Inferred from the URL if None.
        dataset: Dataset name. Inferred from the URL if None.
        max_depth: Maximum subdirectory recursion depth.

    Returns:
        Duplicate-free sources sorted by corpus name.

    Raises:
        ProtectedCollectionError: If the server asks for authentication.
        FetchError: On network failure or a non-success status.
    """
    logger = logging.getLogger(__name__)
    inferred_collection, inferred_dataset = _infer_location(url)
    collection = collection or inferred_collection
    dataset = dataset or inferred_dataset

    found: dict[str, CorpusSource] = {}
    pending: list[tuple[str, str, int]] = [(url, dataset, 0)]
    visited: set[str] = set()
    while pending:
        listing_url, listing_dataset, depth = pending.pop(0)
        response = fetcher.fetch(listing_url)
        response.raise_for_status()
        base = _directory_url(response.url)
        if base in visited:
            continue
        visited.add(base)
        parsed_base = urlparse(base)

        soup = BeautifulSoup(response.content, "html.parser")
        for anchor in soup.find_all("a", href=True):
            href = str(anchor.get("href", "")).strip()  # pyright: ignore[reportUnknownMemberType, reportAttributeAccessIssue]
            if not href or href.startswith(("?", "#", "mailto:", "javascript:")):
                continue
            target = urlparse(urljoin(base, href))
            if target.netloc != parsed_base.netloc:
                continue
            target_url = urlunparse(target._replace(query="", fragment=""))

            if target.path.endswith(".zip"):
                corpus = unquote(posixpath.basename(target.path))[: -len(".zip")]
                if corpus and target_url not in found:
                    found[target_url] = CorpusSource(
                        collection=collection,
                        dataset=listing_dataset,
                        corpus=corpus,
                        archive_url=target_url,
                    )
            elif (
                target.path.endswith("/")
                and depth < max_depth
                and target.path.startswith(parsed_base.path)
                and target.path != parsed_base.path
            ):
                child = unquote(target.path[len(parsed_base.path) :].strip("/"))
                if child and "/" not in child:
                    pending.append((target_url, f"{listing_dataset}/{child}", depth + 1))

    sources = sorted(found.values(), key=lambda s: (s.corpus, s.archive_url))
    logger.info(f"step=scan dataset={dataset}: found {len(sources)} corpus archive(s)")
    return sources
