"""This module loads the pipeline configuration.

The configuration is a TOML document. Every key can be overridden from
the command line; overrides win over the file.

Example document::

    collection = "childes"
    datasets = ["Eng-NA"]
    mirror = "mirror"

    [criteria]
    screening = 'nonempty(CHI.group) and age_in(CHI, 0, 72)'
    target = 'equals(CHI.group, "TD") and age_in(CHI, 0, 72)'

    [rules]
    file = "rules/eng-na.toml"
"""

import os
import tomllib
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Final

from ..chat import ParseMode
from ..criteria import FilterExpr, FilterSyntaxError, parse_expr
from ..harvest import MANIFEST_NAME, RetryPolicy
from ..remote import dataset_url

CONFIG_ENV_VAR: Final = "TALKBANK_HARVEST_CONFIG"
DEFAULT_CONFIG_NAME: Final = "talkbank_harvest.toml"


class ConfigError(ValueError):
    """Raised when the pipeline configuration is invalid."""


@dataclass(frozen=True)
class OutputPaths:
    """Files written by the pipeline."""

    index: Path
    normalized: Path
    change_log: Path
    screen: Path
    pickle: Path | None = None


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved pipeline configuration.

    Paths are absolute and both criteria have been parsed.
    """

    collection: str
    datasets: tuple[str, ...]
    mirror: Path
    screening_text: str
    target_text: str
    screening: FilterExpr
    target: FilterExpr
    outputs: OutputPaths
    base_host: str | None = None
    focus: str = "CHI"
    parallelism: int = 4
    strict: bool = False
    screen: bool = True
    max_depth: int = 1
    timeout: float = 30.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    rules_file: Path | None = None
    add_participant_id: bool = True
    participant_id_separator: str = "/"

    @property
    def mode(self) -> ParseMode:
        return ParseMode.STRICT if self.strict else ParseMode.LENIENT

    @property
    def manifest_path(self) -> Path:
        return self.mirror / MANIFEST_NAME


def default_config_path() -> Path | None:
    """Config path from the environment, else ``talkbank_harvest.toml`` in
    the working directory if it exists."""
    if env := os.environ.get(CONFIG_ENV_VAR):
        return Path(env)
    candidate = Path.cwd() / DEFAULT_CONFIG_NAME
    return candidate if candidate.exists() else None


def _read_document(path: Path) -> dict[str, Any]:
    try:
        with path.open("rb") as f:
            return tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file {path} does not exist.") from e
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"Invalid config file {path}: {e}") from e


def _table(document: Mapping[str, Any], name: str) -> dict[str, Any]:
    value = document.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table.")
    return value  # pyright: ignore[reportUnknownVariableType]


def _typed[T](value: Any, kind: type[T], key: str) -> T:
    # bool is an int subclass; keep the two apart.
    if isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}.")
    if kind is float and isinstance(value, int):
        return float(value)  # pyright: ignore[reportReturnType]
    if not isinstance(value, kind):
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}.")
    return value


def _criteria(
    criteria: Mapping[str, Any], name: str, base_dir: Path
) -> tuple[str, FilterExpr]:
    if f"{name}_file" in criteria:
        path = base_dir / _typed(criteria[f"{name}_file"], str, f"criteria.{name}_file")
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Can not read {name} criteria file {path}: {e}") from e
    else:
        text = _typed(criteria.get(name, ""), str, f"criteria.{name}")
    text = text.strip()
    if not text:
        raise ConfigError(f"The {name} criteria are empty.")
    try:
        return text, parse_expr(text)
    except FilterSyntaxError as e:
        raise ConfigError(f"Invalid {name} criteria: {e}") from e


def _path(value: Any, key: str, base_dir: Path) -> Path:
    return (base_dir / _typed(value, str, key)).resolve()


def build_config(
    document: Mapping[str, Any],
    base_dir: Path,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Build a configuration from a parsed document.

    Args:
        document: The parsed TOML document.
        base_dir: Directory that relative paths in the document resolve
            against.
        overrides: Values from command-line flags, keyed like top-level
            document keys. Relative paths among them resolve against the
            working directory.

    Raises:
        ConfigError: If a key is missing, has the wrong type, names an
            invalid collection or dataset, or a criteria text is empty or
            does not parse.
    """
    overrides = dict(overrides or {})
    cwd = Path.cwd()

    def setting(key: str, default: Any = None) -> tuple[Any, Path]:
        if key in overrides:
            return overrides[key], cwd
        return document.get(key, default), base_dir

    collection = _typed(setting("collection")[0] or "", str, "collection")
    datasets_value = setting("datasets", [])[0]
    if isinstance(datasets_value, str):
        datasets_value = [datasets_value]
    if not isinstance(datasets_value, list):
        raise ConfigError("datasets must be a list of dataset names.")
    datasets = tuple(
        _typed(d, str, "datasets") for d in datasets_value  # pyright: ignore[reportUnknownVariableType]
    )
    if not collection or not datasets:
        raise ConfigError("Both collection and datasets must be configured.")
    base_host_value = setting("base_host")[0]
    base_host = _typed(base_host_value, str, "base_host") if base_host_value else None
    for dataset in datasets:
        try:
            dataset_url(collection, dataset, base_host)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    mirror_value, mirror_base = setting("mirror")
    if not mirror_value:
        raise ConfigError("mirror must be configured.")
    mirror = _path(mirror_value, "mirror", mirror_base)

    criteria = dict(_table(document, "criteria"))
    for name, text in overrides.get("criteria", {}).items():
        criteria.pop(f"{name}_file", None)
        criteria[name] = text
    screening_text, screening = _criteria(criteria, "screening", base_dir)
    target_text, target = _criteria(criteria, "target", base_dir)

    parallelism = _typed(setting("parallelism", 4)[0], int, "parallelism")
    if parallelism < 1:
        raise ConfigError(f"parallelism must be >= 1, got {parallelism}.")
    max_depth = _typed(setting("max_depth", 1)[0], int, "max_depth")
    if max_depth < 0:
        raise ConfigError(f"max_depth must be >= 0, got {max_depth}.")
    timeout = _typed(setting("timeout", 30.0)[0], float, "timeout")
    if timeout <= 0:
        raise ConfigError(f"timeout must be positive, got {timeout}.")

    retry_table = _table(document, "retry")
    try:
        retry = RetryPolicy(
            attempts=_typed(retry_table.get("attempts", 3), int, "retry.attempts"),
            backoff=_typed(retry_table.get("backoff", 1.0), float, "retry.backoff"),
        )
    except ValueError as e:
        raise ConfigError(f"Invalid [retry]: {e}") from e

    rules = _table(document, "rules")
    rules_file = _path(rules["file"], "rules.file", base_dir) if "file" in rules else None

    outputs = _table(document, "outputs")

    def output(key: str, default: str) -> Path:
        if key in outputs:
            return _path(outputs[key], f"outputs.{key}", base_dir)
        return mirror / default

    separator = _typed(
        setting("participant_id_separator", "/")[0], str, "participant_id_separator"
    )
    if not separator:
        raise ConfigError("participant_id_separator must not be empty.")

    return PipelineConfig(
        collection=collection,
        datasets=datasets,
        mirror=mirror,
        screening_text=screening_text,
        target_text=target_text,
        screening=screening,
        target=target,
        outputs=OutputPaths(
            index=output("index", "index.csv"),
            normalized=output("normalized", "index.normalized.csv"),
            change_log=output("change_log", "changes.csv"),
            screen=output("screen", "screen.json"),
            pickle=(
                _path(outputs["pickle"], "outputs.pickle", base_dir)
                if "pickle" in outputs
                else None
            ),
        ),
        base_host=base_host,
        focus=_typed(setting("focus", "CHI")[0], str, "focus"),
        parallelism=parallelism,
        strict=_typed(setting("strict", False)[0], bool, "strict"),
        screen=_typed(setting("screen", True)[0], bool, "screen"),
        max_depth=max_depth,
        timeout=timeout,
        retry=retry,
        rules_file=rules_file,
        add_participant_id=_typed(
            setting("add_participant_id", True)[0], bool, "add_participant_id"
        ),
        participant_id_separator=separator,
    )


def load_config(
    path: Path | None = None, overrides: Mapping[str, Any] | None = None
) -> PipelineConfig:
    """Load the pipeline configuration.

    Args:
        path: Config file. Defaults to :func:`default_config_path`. Without
            any file the configuration comes from ``overrides`` alone.
        overrides: Values from command-line flags.

    Raises:
        ConfigError: If the file is missing or invalid.
    """
    path = path if path is not None else default_config_path()
    if path is None:
        return build_config({}, Path.cwd(), overrides)
    return build_config(_read_document(path), path.resolve().parent, overrides)
