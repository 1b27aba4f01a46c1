"""This module parses the header block of CHAT transcripts into typed
metadata records."""

import logging
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import StrEnum
from typing import Final, Literal


class HeaderParseError(ValueError):
    """Raised when a CHAT header can not be parsed."""


class ParseMode(StrEnum):
    """How header defects are treated.

    In lenient mode malformed lines are skipped and reported as warnings,
    in strict mode they raise :class:`HeaderParseError`.
    """

    LENIENT = "lenient"
    STRICT = "strict"


class Sex(StrEnum):
    """Recognized values of the ``sex`` slot of an ``@ID`` line."""

    MALE = "male"
    FEMALE = "female"


type FieldName = Literal[
    "name", "role", "age", "sex", "group", "ses", "education", "language", "custom"
]

FIELD_NAMES: Final[frozenset[str]] = frozenset(
    {"name", "role", "age", "sex", "group", "ses", "education", "language", "custom"}
)

# Standard CHAT participant roles. An unnamed participant is listed by role.
STANDARD_ROLES: Final[frozenset[str]] = frozenset(
    {
        "Adult", "Attorney", "Audience", "Boy", "Brother", "Caretaker", "Child",
        "Doctor", "Environment", "Father", "Female", "Friend", "Girl",
        "Grandfather", "Grandmother", "Group", "Guest", "Host", "Investigator",
        "Justice", "LENA", "Leader", "Male", "Media", "Member", "Mother",
        "Narrator", "Non_Human", "Nurse", "Other", "Participant", "Partner",
        "PlayRole", "Playmate", "Relative", "Sibling", "Sister", "Speaker",
        "Student", "Target_Adult", "Target_Child", "Teacher", "Teenager", "Text",
        "Therapist", "Uncertain", "Unidentified", "Visitor",
    }
)

# Mean Gregorian month length in days.
DAYS_PER_MONTH: Final = Decimal("30.4375")

KNOWN_HEADERS: Final[frozenset[str]] = frozenset(
    {
        "UTF8",
        "PID",
        "Begin",
        "End",
        "Font",
        "Window",
        "Color words",
        "Languages",
        "Participants",
        "ID",
        "Options",
        "Media",
        "Date",
        "Location",
        "Situation",
        "Types",
        "Comment",
        "Transcriber",
        "Transcription",
        "Recording Quality",
        "Room Layout",
        "Tape Location",
        "Time Duration",
        "Time Start",
        "Number",
        "Activities",
        "Warning",
        "Bg",
        "Eg",
        "G",
        "Blank",
        "New Episode",
        "Page",
        "Videos",
        "Exceptions",
    }
)
_PER_PARTICIPANT_HEADER_PREFIXES: Final = ("Birth of ", "Birthplace of ", "L1 of ")

_HEADER_LINE = re.compile(r"^@(?P<key>[^:]+?)(?::(?P<sep>[ \t]*)(?P<value>.*))?$")
_AGE = re.compile(r"^(?P<years>\d+);(?:(?P<months>\d+)(?:\.(?P<days>\d*))?)?$")
_ID_SLOTS: Final = 10
_BOM: Final = b"\xef\xbb\xbf"


@dataclass(frozen=True)
class ParticipantRecord:
    """One participant of a transcript.

    ``code``, ``name`` and ``role`` come from ``@Participants``, everything
    else from the participant's ``@ID`` line. Empty ``@ID`` slots are stored
    as ``None``; ``has_id`` tells whether an ``@ID`` line existed at all.
    """

    code: str
    role: str
    name: str | None = None
    language: str | None = None
    age: str | None = None
    age_months: float | None = None
    sex: Sex | str | None = None
    group: str | None = None
    ses: str | None = None
    education: str | None = None
    custom: str | None = None
    has_id: bool = False

    def __post_init__(self) -> None:
        if not self.code or any(c.isspace() or c == "|" for c in self.code):
            raise ValueError(f"Invalid participant code {self.code!r}.")
        if self.age_months is not None and not (0 <= self.age_months < float("inf")):
            raise ValueError(f"Invalid age in months: {self.age_months}.")

    def get(self, field_name: str) -> str | None:
        """Return the raw string value of a field, or None when it is
        absent or blank."""
        if field_name not in FIELD_NAMES:
            raise ValueError(
                f"Unknown participant field {field_name!r}. "
                f"Expected one of: {', '.join(sorted(FIELD_NAMES))}."
            )
        value: str | None = getattr(self, field_name)
        if value is None or not value.strip():
            return None
        return str(value)


@dataclass(frozen=True)
class HeaderMetadata:
    """Parsed header of one CHAT file."""

    participants: Mapping[str, ParticipantRecord]
    types: tuple[str, ...] = ()
    languages: tuple[str, ...] = ()
    file_path: str = ""
    corpus: str | None = None
    date: str | None = None
    location: str | None = None
    raw_warnings: tuple[str, ...] = field(default=())

    @property
    def codes(self) -> tuple[str, ...]:
        """Participant codes in declaration order."""
        return tuple(self.participants)


@dataclass
class _HeaderLine:
    lineno: int
    key: str
    value: str | None
    has_separator: bool


def _iter_header_lines(text: str) -> Iterator[_HeaderLine]:
    """Yield the lines of the leading header block.

    Lines starting with a tab continue the previous header line. The block
    ends at the first line that is neither.
    """
    current: _HeaderLine | None = None
    for lineno, line in enumerate(text.removeprefix("\ufeff").splitlines(), start=1):
        if line.startswith("@"):
            if current is not None:
                yield current
            match = _HEADER_LINE.match(line.rstrip())
            assert match is not None  # the pattern accepts any line starting with "@"
            value = match["value"]
            current = _HeaderLine(
                lineno=lineno,
                key=match["key"].strip(),
                value=value.strip() if value is not None else None,
                has_separator=bool(match["sep"]) or not value,
            )
        elif line.startswith("\t") and current is not None:
            continuation = line.strip()
            current.value = f"{current.value or ''} {continuation}".strip()
        else:
            break
    if current is not None:
        yield current


def _optional(value: str) -> str | None:
    value = value.strip()
    return value or None


def _parse_sex(value: str) -> Sex | str | None:
    value = value.strip()
    if not value:
        return None
    try:
        return Sex(value.lower())
    except ValueError:
        return value


def parse_age(
    token: str | None,
    mode: ParseMode | str = ParseMode.LENIENT,
    warnings: list[str] | None = None,
) -> float | None:
    """Convert a CHAT age (``Y;M.D``) into months.

    Days are converted with a mean month of 30.4375 days and the result is
    rounded half-up to one decimal place.

    Args:
        token: The age string, e.g. ``"1;08."``. Empty or None means absent.
        mode: Lenient mode returns None for malformed tokens, strict mode raises.
        warnings: Optional list receiving a diagnostic for malformed tokens.

    Returns:
        Age in months, or None when the age is absent or malformed (lenient).

    Raises:
        HeaderParseError: If the token is malformed and mode is strict.

    Examples:
        >>> parse_age("1;8.")
        20.0
        >>> parse_age("2;6.15")
        30.5
        >>> parse_age("") is None
        True
    """
    if token is None or not token.strip():
        return None
    token = token.strip()
    match = _AGE.fullmatch(token)
    months = int(match["months"]) if match is not None and match["months"] else 0
    if match is None or months >= 12:
        message = f"Malformed age {token!r}"
        if ParseMode(mode) is ParseMode.STRICT:
            raise HeaderParseError(message)
        if warnings is not None:
            warnings.append(message)
        return None

    days = int(match["days"]) if match["days"] else 0
    total = Decimal(int(match["years"]) * 12 + months) + Decimal(days) / DAYS_PER_MONTH
    return float(total.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


class _HeaderBuilder:
    """Accumulates header lines into a HeaderMetadata."""

    def __init__(self, mode: ParseMode) -> None:
        self.mode = mode
        self.warnings: list[str] = []
        self.declared: dict[str, ParticipantRecord] = {}
        self.seen_participants = False
        self.id_fields: dict[str, dict[str, str]] = {}
        self.types: tuple[str, ...] = ()
        self.languages: tuple[str, ...] = ()
        self.date: str | None = None
        self.location: str | None = None
        self.id_corpus: str | None = None

    def defect(self, line: _HeaderLine, message: str, fatal: bool = True) -> None:
        text = f"line {line.lineno}: {message}"
        if fatal and self.mode is ParseMode.STRICT:
            raise HeaderParseError(text)
        self.warnings.append(text)

    def add(self, line: _HeaderLine) -> None:
        if not line.has_separator:
            self.defect(
                line,
                f"missing tab or space after '@{line.key}:'",
                fatal=line.key in ("Participants", "ID"),
            )
            return

        match line.key:
            case "Participants":
                self.add_participants(line)
            case "ID":
                self.add_id(line)
            case "Types":
                self.types = tuple(
                    label.strip() for label in (line.value or "").split(",") if label.strip()
                )
            case "Languages":
                self.languages = tuple(
                    lang.strip() for lang in (line.value or "").split(",") if lang.strip()
                )
            case "Date":
                self.date = line.value or None
            case "Location":
                self.location = line.value or None
            case key if key in KNOWN_HEADERS or key.startswith(
                _PER_PARTICIPANT_HEADER_PREFIXES
            ):
                pass
            case key:
                self.warnings.append(
                    f"line {line.lineno}: unrecognized header '@{key}' preserved"
                )

    def add_participants(self, line: _HeaderLine) -> None:
        if self.seen_participants:
            self.defect(line, "duplicate @Participants line")
            return
        self.seen_participants = True

        for entry in (line.value or "").split(","):
            tokens = entry.split()
            if len(tokens) < 2:
                self.defect(line, f"malformed participant entry {entry.strip()!r}")
                continue
            code, role = tokens[0], tokens[-1]
            name = " ".join(tokens[1:-1]) or None
            if "|" in code or code in self.declared:
                self.defect(line, f"invalid or duplicate participant code {code!r}")
                continue
            self.declared[code] = ParticipantRecord(code=code, role=role, name=name)

    def add_id(self, line: _HeaderLine) -> None:
        slots = (line.value or "").split("|")
        if len(slots) < _ID_SLOTS or any(s.strip() for s in slots[_ID_SLOTS:]):
            self.defect(line, f"malformed @ID line {line.value!r}")
            return
        language, corpus, code, age, sex, group, ses, _role, education, custom = (
            s.strip() for s in slots[:_ID_SLOTS]
        )
        if code not in self.declared or code in self.id_fields:
            self.defect(line, f"@ID for undeclared or repeated participant {code!r}")
            return

        self.id_fields[code] = dict(
            language=language,
            age=age,
            sex=sex,
            group=group,
            ses=ses,
            education=education,
            custom=custom,
            lineno=str(line.lineno),
        )
        if self.id_corpus is None and corpus:
            self.id_corpus = corpus

    def participants(self) -> dict[str, ParticipantRecord]:
        records: dict[str, ParticipantRecord] = {}
        for code, declared in self.declared.items():
            fields = self.id_fields.get(code)
            if fields is None:
                records[code] = declared
                continue
            age_warnings: list[str] = []
            age_months = parse_age(fields["age"], self.mode, age_warnings)
            self.warnings.extend(f"line {fields['lineno']}: {w}" for w in age_warnings)
            records[code] = ParticipantRecord(
                code=code,
                role=declared.role,
                name=declared.name,
                language=_optional(fields["language"]),
                age=_optional(fields["age"]) if age_months is not None else None,
                age_months=age_months,
                sex=_parse_sex(fields["sex"]),
                group=_optional(fields["group"]),
                ses=_optional(fields["ses"]),
                education=_optional(fields["education"]),
                custom=_optional(fields["custom"]),
                has_id=True,
            )
        return records


def parse_header(
    text: str | bytes,
    mode: ParseMode | str = ParseMode.LENIENT,
    *,
    file_path: str = "",
    corpus: str | None = None,
) -> HeaderMetadata:
    """Parse the header block of a CHAT transcript.

    Only the leading ``@`` lines are read; the header ends at the first line
    that is not a header line or a tab-indented continuation of one.

    Args:
        text: The transcript text, or its UTF-8 encoded bytes.
        mode: Lenient or strict handling of malformed header lines.
        file_path: Path recorded in the result, relative to the mirror root.
        corpus: Corpus name. If None, the corpus slot of the first ``@ID``
            line is used.

    Returns:
        The parsed header metadata.

    Raises:
        HeaderParseError: If the bytes are not UTF-8, the header has no
            ``@Participants`` line, or (strict mode) any header line is malformed.

    Examples:
        >>> header = parse_header(
        ...     "@Begin\\n@Participants:\\tCHI Target_Child, MOT Mother\\n"
        ... )
        >>> header.codes
        ('CHI', 'MOT')
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise HeaderParseError(f"Transcript is not valid UTF-8: {e}") from e

    builder = _HeaderBuilder(ParseMode(mode))
    for line in _iter_header_lines(text):
        builder.add(line)

    if not builder.seen_participants:
        raise HeaderParseError("Header has no @Participants line.")

    header = HeaderMetadata(
        participants=builder.participants(),
        types=builder.types,
        languages=builder.languages,
        file_path=file_path,
        corpus=corpus if corpus is not None else builder.id_corpus,
        date=builder.date,
        location=builder.location,
        raw_warnings=tuple(builder.warnings),
    )
    if header.raw_warnings:
        logging.getLogger(__name__).debug(
            f"file={file_path or '<text>'}: {len(header.raw_warnings)} header warning(s)"
        )
    return header


def get_field(header: HeaderMetadata, code: str, field: str) -> str | None:
    """Look up one participant field.

    Args:
        header: Parsed header.
        code: Speaker code, e.g. ``"MOT"``.
        field: One of name, role, age, sex, group, ses, education, language, custom.

    Returns:
        The raw value, or None when the participant or the value is absent.

    Raises:
        ValueError: If ``field`` is not a known field name.
    """
    if field not in FIELD_NAMES:
        raise ValueError(
            f"Unknown participant field {field!r}. "
            f"Expected one of: {', '.join(sorted(FIELD_NAMES))}."
        )
    record = header.participants.get(code)
    if record is None:
        return None
    return record.get(field)


def take_header_block(lines: Iterable[bytes]) -> bytes:
    """Collect the raw header block from an iterable of byte lines.

    Iteration stops at the first line that is neither a header line nor a
    tab-indented continuation, so only the header of a large transcript is
    read.
    """
    block: list[bytes] = []
    for raw in lines:
        line = raw.removeprefix(_BOM) if not block else raw
        if line.startswith(b"@") or (block and line.startswith(b"\t")):
            block.append(line)
        else:
            break
    return b"".join(block)
