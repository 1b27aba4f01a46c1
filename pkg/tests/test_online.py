"""Smoke tests against the live TalkBank servers.

Skipped unless ``TALKBANK_HARVEST_ONLINE=1``; the remote datasets may
change over time.
"""

import io

import pytest

from talkbank_harvest.criteria import parse_expr
from talkbank_harvest.harvest import RetryPolicy, screen_dataset
from talkbank_harvest.harvest.archive import iter_chat_entries, open_archive
from talkbank_harvest.remote import RequestsPageFetcher, dataset_url, scan_zip_urls
from tests.helpers import (
    CHILD_SES_CRITERIA,
    assert_agrees_with_reference_reader,
    skip_unless_online,
)

ENG_NA_SELECTION = [
    "Bates",
    "Bernstein",
    "Brown",
    "Clark",
    "Demetras2",
    "Gleason",
    "HSLLD",
    "Hall",
    "Hicks",
    "Nelson",
    "NewmanRatner",
    "Post",
    "VanHouten",
]


@pytest.mark.online
class TestEngNA:
    """Scanning and screening the North American English CHILDES data."""

    @pytest.fixture
    def sources(self):
        skip_unless_online()
        return scan_zip_urls(
            dataset_url("childes", "Eng-NA"), RequestsPageFetcher(timeout=60.0), max_depth=0
        )

    def test_scan(self, sources):
        assert len(sources) == 47

    def test_screen(self, sources):
        results = screen_dataset(
            sources,
            parse_expr(CHILD_SES_CRITERIA),
            RequestsPageFetcher(timeout=120.0),
            8,
            retry=RetryPolicy(attempts=3, backoff=2.0),
        )
        assert sorted(r.source.corpus for r in results if r.selected) == sorted(
            ENG_NA_SELECTION
        )


@pytest.mark.online
class TestRealHeaders:
    """Compares parsed headers of downloaded transcripts with pylangacq."""

    @pytest.mark.parametrize("corpus", ["Bates", "Brown", "VanHouten"])
    def test_matches_pylangacq(self, corpus):
        skip_unless_online()
        buffer = io.BytesIO()
        RequestsPageFetcher(timeout=120.0).download(
            f"{dataset_url('childes', 'Eng-NA')}/{corpus}.zip", buffer
        )
        buffer.seek(0)
        with open_archive(buffer, corpus) as archive:
            entries = list(iter_chat_entries(archive))[:10]
            assert len(entries) == 10
            for info in entries:
                text = archive.read(info).decode("utf-8")
                assert_agrees_with_reference_reader(text, info.filename)
