from .header import (
    FIELD_NAMES,
    STANDARD_ROLES,
    HeaderMetadata,
    HeaderParseError,
    ParseMode,
    ParticipantRecord,
    Sex,
    get_field,
    parse_age,
    parse_header,
    take_header_block,
)

__all__ = [
    "FIELD_NAMES",
    "HeaderMetadata",
    "HeaderParseError",
    "ParseMode",
    "ParticipantRecord",
    "STANDARD_ROLES",
    "Sex",
    "get_field",
    "parse_age",
    "parse_header",
    "take_header_block",
]
