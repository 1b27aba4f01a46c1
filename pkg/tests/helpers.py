"""Builders for CHAT transcripts, corpus archives and fetchers used in
tests."""

import io
import os
import zipfile
from collections.abc import Mapping, Sequence
from pathlib import Path

import pytest

from talkbank_harvest.remote import FetchResponse, PageFetcher

# Child with SES info on the child, the mother or the mother's education.
CHILD_SES_CRITERIA = (
    "exists(CHI) and (nonempty(CHI.ses) or (exists(MOT) and nonempty(MOT.ses)) "
    "or (exists(MOT) and nonempty(MOT.education)))"
)


def skip_unless_online():
    if os.environ.get("TALKBANK_HARVEST_ONLINE") != "1":
        pytest.skip("Set TALKBANK_HARVEST_ONLINE=1 to run live network tests.")


def id_line(
    code: str,
    *,
    corpus: str = "Test",
    language: str = "eng",
    age: str = "",
    sex: str = "",
    group: str = "",
    ses: str = "",
    role: str = "",
    education: str = "",
    custom: str = "",
) -> str:
    return (
        f"@ID:\t{language}|{corpus}|{code}|{age}|{sex}|{group}|{ses}|{role}|"
        f"{education}|{custom}|"
    )


def chat_text(
    participants: str,
    ids: Sequence[str] = (),
    types: str | None = None,
    extra: Sequence[str] = (),
) -> str:
    """A small but complete CHAT transcript."""
    lines = ["@UTF8", "@Begin", "@Languages:\teng", f"@Participants:\t{participants}"]
    lines.extend(ids)
    if types is not None:
        lines.append(f"@Types:\t{types}")
    lines.extend(extra)
    lines.extend(
        [
            "*CHI:\tmore cookie .",
            "%mor:\tqn|more n|cookie .",
            "*MOT:\tyou want more ?",
            "@End",
        ]
    )
    return "\n".join(lines) + "\n"


def child_chat(
    corpus: str,
    *,
    name: str | None = None,
    age: str = "2;0.",
    sex: str = "female",
    group: str = "TD",
    ses: str = "",
    mot_ses: str = "",
    mot_education: str = "",
    types: str = "long, toyplay, TD",
) -> str:
    """Transcript of a child and its mother."""
    child = f"CHI {name} Target_Child" if name else "CHI Target_Child"
    return chat_text(
        f"{child}, MOT Mother",
        [
            id_line(
                "CHI",
                corpus=corpus,
                age=age,
                sex=sex,
                group=group,
                ses=ses,
                role="Target_Child",
            ),
            id_line(
                "MOT",
                corpus=corpus,
                ses=mot_ses,
                role="Mother",
                education=mot_education,
            ),
        ],
        types,
    )


def matching_chat(corpus: str, name: str | None = None) -> str:
    """Transcript that satisfies CHILD_SES_CRITERIA."""
    return child_chat(corpus, name=name, ses="MC")


def plain_chat(corpus: str, name: str | None = None) -> str:
    """Transcript that does not satisfy CHILD_SES_CRITERIA."""
    return child_chat(corpus, name=name)


def make_zip(entries: Mapping[str, str | bytes]) -> bytes:
    """Zip archive with the entries in the given order."""
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        for name, content in entries.items():
            data = content.encode("utf-8") if isinstance(content, str) else content
            archive.writestr(name, data)
    return buffer.getvalue()


def fixture_corpora() -> dict[str, dict[str, str]]:
    """Five mini-corpora, three of which contain a CHILD_SES_CRITERIA match.

    Members are ``<corpus>/<file>.cha`` in archive order. ``Alpha`` has
    its first match at the second file; ``Delta`` also holds a non-CHAT
    member.
    """
    return {
        "Alpha": {
            "Alpha/a1.cha": plain_chat("Alpha", "Ann"),
            "Alpha/a2.cha": matching_chat("Alpha", "Ann"),
            "Alpha/a3.cha": plain_chat("Alpha", "Ann"),
        },
        "Beta": {
            "Beta/b1.cha": plain_chat("Beta", "Ben"),
            "Beta/b2.cha": plain_chat("Beta", "Ben"),
            "Beta/b3.cha": plain_chat("Beta", "Bea"),
        },
        "Delta": {
            "Delta/0readme.txt": "no transcripts here\n",
            "Delta/d1.cha": plain_chat("Delta", "Dan"),
            "Delta/d2.cha": plain_chat("Delta", "Dan"),
            "Delta/d3.cha": chat_text("MOT Mother", [id_line("MOT", corpus="Delta", ses="WC")]),
            "Delta/d4.cha": plain_chat("Delta", "Dot"),
        },
        "Epsilon": {
            "Epsilon/e1.cha": plain_chat("Epsilon", "Eve"),
            "Epsilon/e2.cha": plain_chat("Epsilon", "Eve"),
            "Epsilon/e3.cha": child_chat("Epsilon", name="Eve", mot_education="college"),
        },
        "Gamma": {
            "Gamma/g1.cha": child_chat("Gamma", name="Gus", mot_ses="WC"),
            "Gamma/g2.cha": plain_chat("Gamma", "Gus"),
            "Gamma/g3.cha": matching_chat("Gamma", "Gil"),
        },
    }


# Corpora of fixture_corpora() containing at least one CHILD_SES_CRITERIA match.
SELECTED_CORPORA = ["Alpha", "Epsilon", "Gamma"]


def write_site(
    root: Path,
    corpora: Mapping[str, Mapping[str, str | bytes]],
    collection: str = "childes",
    dataset: str = "Eng-NA",
) -> Path:
    """Write corpus archives the way a TalkBank data directory holds them.

    Returns:
        The dataset directory.
    """
    directory = root / collection / "data" / dataset
    directory.mkdir(parents=True, exist_ok=True)
    for corpus, entries in corpora.items():
        (directory / f"{corpus}.zip").write_bytes(make_zip(entries))
    return directory


def write_mirror(
    root: Path,
    corpora: Mapping[str, Mapping[str, str | bytes]],
    collection: str = "childes",
    dataset: str = "Eng-NA",
) -> Path:
    """Write corpora as an extracted local mirror."""
    for corpus, entries in corpora.items():
        corpus_root = root / collection / dataset / corpus
        for name, content in entries.items():
            path = corpus_root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(content, str):
                path.write_text(content, encoding="utf-8")
            else:
                path.write_bytes(content)
    return root


class StaticFetcher(PageFetcher):
    """PageFetcher serving canned pages; unknown URLs get 404."""

    def __init__(self, pages: Mapping[str, bytes | FetchResponse]) -> None:
        self.pages = dict(pages)
        self.requested: list[str] = []

    def fetch(self, url: str) -> FetchResponse:
        self.requested.append(url)
        page = self.pages.get(url)
        if page is None:
            return FetchResponse(url=url, status=404)
        if isinstance(page, FetchResponse):
            return page
        return FetchResponse(url=url, status=200, content=page)


# @ID slots compared with the reference reader.
REFERENCE_ID_FIELDS = ("language", "age", "sex", "group", "ses", "role", "education", "custom")


def _blank_to_none(value) -> str | None:
    if value is None or not str(value).strip():
        return None
    return str(value).strip()


def assert_agrees_with_reference_reader(text: str, label: str) -> None:
    """Compare ``parse_header`` with pylangacq on one transcript.

    Fields only this package derives (``has_id``, ``age_months``) are not
    compared. A malformed age is absent here but kept raw by pylangacq, so
    it must come with a warning instead.
    """
    pylangacq = pytest.importorskip("pylangacq")
    from talkbank_harvest.chat import parse_header

    header = parse_header(text, file_path=label)
    reference = pylangacq.Reader.from_strs([text], parallel=False).headers()[0]
    expected = reference.get("Participants", {})

    assert sorted(header.codes) == sorted(expected), label
    for code, fields in expected.items():
        record = header.participants[code]
        corpus = _blank_to_none(fields.get("corpus"))
        if corpus is not None:
            assert header.corpus == corpus, (label, code)
        for field in REFERENCE_ID_FIELDS:
            want = _blank_to_none(fields.get(field))
            got = record.get(field)
            if field == "age" and got is None and want is not None:
                assert any("Malformed age" in w for w in header.raw_warnings), (label, code)
                continue
            assert got == want, (label, code, field)
        if record.name is not None and " " not in record.name:
            assert _blank_to_none(fields.get("name")) == record.name, (label, code)
