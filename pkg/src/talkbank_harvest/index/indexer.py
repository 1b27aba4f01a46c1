"""This module builds the index table from a local mirror.

Unlike screening, indexing inspects every CHAT file.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import UTC, datetime
from pathlib import Path

from ..chat import HeaderMetadata, HeaderParseError, ParseMode, parse_header, take_header_block
from ..criteria import FilterExpr, eval_expr, format_expr
from ..harvest.download import MANIFEST_NAME, Manifest
from .table import IndexRow, IndexTable, Provenance

# Speaker whose SES stands in for the focus participant's.
SES_FALLBACK_CODE = "MOT"


def row_from_header(
    header: HeaderMetadata,
    focus: str = "CHI",
    warnings: list[str] | None = None,
) -> IndexRow:
    """Build the index row of one header.

    Participant-level columns come from the focus participant. An unnamed
    focus participant is listed under its role. ``ses`` falls back to the
    mother's when the focus participant has none.

    Args:
        header: Parsed header with at least one participant.
        focus: Focus speaker code.
        warnings: Optional list receiving a note when the focus
            participant is absent.

    Returns:
        The row. Without a focus participant all participant-level columns
        are missing.

    Raises:
        ValueError: If the header has no participants.

    Examples:
        >>> header = parse_header(
        ...     "@Participants:\\tCHI Target_Child, MOT Mother\\n"
        ...     "@ID:\\teng|Bates|CHI|1;8.|female|TD|MC|Target_Child|||\\n"
        ...     "@ID:\\teng|Bates|MOT|||||Mother|||\\n"
        ...     "@Types:\\tcross, toyplay, TD\\n",
        ...     file_path="../amy.cha",
        ... )
        >>> row = row_from_header(header)
        >>> (row.corpus, row.participants, row.name, row.age_m, row.study_type)
        ('Bates', 'CHI, MOT', 'Target_Child', 20.0, 'cross, toyplay, TD')
    """
    if not header.participants:
        raise ValueError(f"Header of {header.file_path or '<text>'} has no participants.")

    base = IndexRow(
        file_path=header.file_path,
        corpus=header.corpus or "",
        participants=", ".join(header.codes),
        study_type=", ".join(header.types),
    )
    record = header.participants.get(focus)
    if record is None:
        message = f"{header.file_path}: focus participant {focus} absent"
        if warnings is not None:
            warnings.append(message)
        logging.getLogger(__name__).warning(
            f"step=index corpus={base.corpus} file={header.file_path}: "
            f"focus participant {focus} absent"
        )
        return base

    ses = record.get("ses")
    if ses is None and SES_FALLBACK_CODE in header.participants:
        ses = header.participants[SES_FALLBACK_CODE].get("ses")

    return replace(
        base,
        name=record.get("name") or record.get("role"),
        age_m=record.age_months,
        sex=record.get("sex"),
        group=record.get("group"),
        ses=ses,
    )


def _corpus_roots(root: Path) -> list[tuple[str, ...]]:
    """Extraction roots recorded in the mirror manifest, longest first."""
    path = root / MANIFEST_NAME
    if not path.is_file():
        return []
    try:
        manifest = Manifest.load(path)
    except ValueError as e:
        logging.getLogger(__name__).warning(f"step=index: manifest ignored ({e})")
        return []
    roots = {tuple(entry.extraction_root.split("/")) for entry in manifest.entries.values()}
    return sorted(roots, key=lambda parts: (-len(parts), parts))


def _layout_corpus(
    root: Path, parts: tuple[str, ...], corpus_roots: list[tuple[str, ...]]
) -> str:
    """Corpus of a mirror-relative file path.

    A recorded extraction root wins. Otherwise the mirror layout
    ``<collection>/<dataset>/<corpus>/...`` applies, and files above it
    belong to the nearest directory.
    """
    for corpus_root in corpus_roots:
        if parts[: len(corpus_root)] == corpus_root and len(parts) > len(corpus_root):
            return corpus_root[-1]
    directories = parts[:-1]
    if len(directories) >= 3:
        return directories[2]
    return directories[-1] if directories else root.name


def _find_chat_files(root: Path) -> list[Path]:
    return sorted(
        path
        for path in root.rglob("*")
        if path.suffix.lower() == ".cha"
        and path.is_file()
        and not any(part.startswith(".") for part in path.relative_to(root).parts)
    )


def index_files(
    root: Path,
    criteria: FilterExpr,
    focus: str = "CHI",
    *,
    parallelism: int = 1,
    mode: ParseMode = ParseMode.LENIENT,
    criteria_text: str | None = None,
) -> IndexTable:
    """Index every CHAT file below ``root`` that satisfies ``criteria``.

    A file's corpus is the corpus slot of its first ``@ID`` line. Without
    one it is the extraction root recorded in the mirror manifest, else
    the corpus directory of the mirror layout. Files that can not be read
    or parsed, or that declare no participants, are skipped with a warning.

    Args:
        root: Mirror root directory.
        criteria: Target criteria.
        focus: Focus speaker code.
        parallelism: Number of files parsed concurrently.
        mode: Header parsing mode.
        criteria_text: Criteria source recorded in the provenance. Defaults
            to the canonical form of ``criteria``.

    Returns:
        The index table, sorted by ``(corpus, file_path)``.

    Raises:
        FileNotFoundError: If ``root`` is not a directory.
        ValueError: If parallelism is less than 1.
    """
    if not root.is_dir():
        raise FileNotFoundError(f"Mirror root {root} is not a directory.")
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}.")
    logger = logging.getLogger(__name__)

    def index_one(path: Path) -> tuple[IndexRow | None, list[str]]:
        relative = path.relative_to(root).as_posix()
        warnings: list[str] = []
        try:
            with path.open("rb") as f:
                header = parse_header(take_header_block(f), mode, file_path=relative)
        except (OSError, HeaderParseError) as e:
            logger.warning(f"step=index file={relative}: skipped ({e})")
            return None, [f"{relative}: {e}"]

        if not header.participants:
            logger.warning(f"step=index file={relative}: skipped (no participants declared)")
            return None, [f"{relative}: no participants declared"]
        if header.corpus is None:
            header = replace(
                header, corpus=_layout_corpus(root, path.relative_to(root).parts, corpus_roots)
            )
        matched = eval_expr(criteria, header)
        logger.debug(
            f"step=index corpus={header.corpus} file={relative}: "
            f"{'match' if matched else 'no match'}"
        )
        if not matched:
            return None, warnings
        return row_from_header(header, focus, warnings), warnings

    corpus_roots = _corpus_roots(root)
    files = _find_chat_files(root)
    with ThreadPoolExecutor(max_workers=parallelism) as executor:
        results = list(executor.map(index_one, files))

    rows = [row for row, _ in results if row is not None]
    warnings = [warning for _, file_warnings in results for warning in file_warnings]
    logger.info(f"step=index: {len(rows)} of {len(files)} file(s) matched")

    provenance = Provenance(
        criteria=criteria_text if criteria_text is not None else format_expr(criteria),
        mirror_root=str(root.resolve()),
        created_at=datetime.now(UTC).isoformat(timespec="seconds"),
        focus=focus,
    )
    return IndexTable.from_rows(rows, provenance, warnings)
