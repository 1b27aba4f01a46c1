from .identifiers import add_participant_id
from .labels import count_missing, get_labels
from .rules import (
    LABEL_COLUMNS,
    CaseFoldTo,
    FillMissing,
    LabelChange,
    LabelRule,
    LabelRuleSet,
    Rename,
    RuleSetError,
    TrimTrailing,
    apply_rules,
    load_rules,
    rules_from_mapping,
    write_change_log,
)

__all__ = [
    "LABEL_COLUMNS",
    "CaseFoldTo",
    "FillMissing",
    "LabelChange",
    "LabelRule",
    "LabelRuleSet",
    "Rename",
    "RuleSetError",
    "TrimTrailing",
    "add_participant_id",
    "apply_rules",
    "count_missing",
    "get_labels",
    "load_rules",
    "rules_from_mapping",
    "write_change_log",
]
