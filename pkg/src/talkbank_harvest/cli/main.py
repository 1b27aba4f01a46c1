"""Command line interface of the harvesting pipeline.

Subcommands run the pipeline steps one at a time (``scan``, ``screen``,
``fetch``, ``index``, ``labels``, ``normalize``) or all in order (``run``).
Online steps recompute the online steps before them; offline steps read
the files written by earlier steps.

Exit codes: 0 on success, 1 on runtime failure, 2 on configuration or
usage errors.
"""

import argparse
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..chat import HeaderParseError
from ..curate import (
    LabelRuleSet,
    RuleSetError,
    add_participant_id,
    apply_rules,
    count_missing,
    get_labels,
    load_rules,
    write_change_log,
)
from ..harvest import (
    ArchiveError,
    Manifest,
    ScreeningError,
    extraction_root,
    fetch_corpora,
    screen_dataset,
)
from ..index import COLUMNS, IndexTable, index_files, read_index, write_index
from ..remote import (
    CorpusSource,
    FetchError,
    PageFetcher,
    RequestsPageFetcher,
    dataset_url,
    scan_zip_urls,
)
from .config import ConfigError, PipelineConfig, load_config

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(verbose: bool = False) -> None:
    """Configure logging for command line runs."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler()],
    )


@dataclass
class Context:
    """State shared by the steps of one command."""

    config: PipelineConfig
    fetcher: PageFetcher
    dry_run: bool = False
    logger: logging.Logger = field(
        default_factory=lambda: logging.getLogger(f"{__name__}.Context")
    )


def scan(ctx: Context) -> list[CorpusSource]:
    """Find the corpus archives of every configured dataset."""
    config = ctx.config
    sources: list[CorpusSource] = []
    for dataset in config.datasets:
        url = dataset_url(config.collection, dataset, config.base_host)
        sources.extend(
            scan_zip_urls(
                url,
                ctx.fetcher,
                collection=config.collection,
                dataset=dataset,
                max_depth=config.max_depth,
            )
        )
    return sources


def screen(ctx: Context, sources: Sequence[CorpusSource]) -> list[CorpusSource]:
    """Screen the sources and return the selected ones.

    With screening disabled every source is selected.
    """
    config = ctx.config
    if not config.screen:
        ctx.logger.info(f"step=screen: disabled, selecting all {len(sources)} corpora")
        return list(sources)

    results = screen_dataset(
        sources,
        config.screening,
        ctx.fetcher,
        config.parallelism,
        mode=config.mode,
        retry=config.retry,
    )
    for result in results:
        mark = "selected" if result.selected else ("failed" if result.error else "skipped")
        print(
            f"{mark}\t{result.source.key}\t{result.files_inspected}\t"
            f"{result.first_match or ''}"
        )
    if not ctx.dry_run:
        path = config.outputs.screen
        path.parent.mkdir(parents=True, exist_ok=True)
        report = {
            "criteria": config.screening_text,
            "results": [result.to_dict() for result in results],
        }
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    selected = [result.source for result in results if result.selected]
    ctx.logger.info(f"step=screen: {len(selected)} of {len(results)} corpora selected")
    return selected


def fetch(ctx: Context, sources: Sequence[CorpusSource]) -> None:
    """Download and extract the given corpora into the mirror."""
    config = ctx.config
    if ctx.dry_run:
        for source in sources:
            print(f"would fetch\t{source.key}\t{extraction_root(source, config.mirror)}")
        return
    manifest = Manifest.load(config.manifest_path)
    roots = fetch_corpora(
        sources,
        config.mirror,
        ctx.fetcher,
        manifest,
        config.parallelism,
        retry=config.retry,
    )
    for source, root in zip(sources, roots, strict=True):
        print(f"fetched\t{source.key}\t{root}")


def index(ctx: Context) -> IndexTable:
    """Index the mirror against the target criteria."""
    config = ctx.config
    if ctx.dry_run and not config.mirror.is_dir():
        ctx.logger.info(f"step=index: mirror {config.mirror} does not exist yet")
        return IndexTable()
    table = index_files(
        config.mirror,
        config.target,
        config.focus,
        parallelism=config.parallelism,
        mode=config.mode,
        criteria_text=config.target_text,
    )
    if not ctx.dry_run:
        write_index(table, config.outputs.index)
    print(f"indexed\t{len(table)} file(s)\t{config.outputs.index}")
    return table


def _load_rule_set(config: PipelineConfig) -> LabelRuleSet:
    if config.rules_file is None:
        return LabelRuleSet({})
    try:
        return load_rules(config.rules_file)
    except OSError as e:
        raise ConfigError(f"Can not read rule file {config.rules_file}: {e}") from e


def _write_pickle(table: IndexTable, path: Path) -> None:
    try:
        from ..index.pandas import to_dataframe
    except ModuleNotFoundError as e:
        raise ConfigError(
            "outputs.pickle needs pandas; install talkbank-harvest[pandas]."
        ) from e
    path.parent.mkdir(parents=True, exist_ok=True)
    to_dataframe(table).to_pickle(path)


def normalize(ctx: Context, table: IndexTable) -> IndexTable:
    """Clean labels and add participant identifiers."""
    config = ctx.config
    rules = _load_rule_set(config)
    cleaned, changes = apply_rules(table, rules)
    if config.add_participant_id:
        cleaned = add_participant_id(cleaned, config.participant_id_separator)
    if not ctx.dry_run:
        write_index(cleaned, config.outputs.normalized)
        write_change_log(changes, config.outputs.change_log)
        if config.outputs.pickle is not None:
            _write_pickle(cleaned, config.outputs.pickle)
    print(f"normalized\t{len(changes)} change(s)\t{config.outputs.normalized}")
    return cleaned


def cmd_scan(ctx: Context, args: argparse.Namespace) -> None:
    for source in scan(ctx):
        print(f"{source.key}\t{source.archive_url}")


def cmd_screen(ctx: Context, args: argparse.Namespace) -> None:
    screen(ctx, scan(ctx))


def cmd_fetch(ctx: Context, args: argparse.Namespace) -> None:
    fetch(ctx, screen(ctx, scan(ctx)))


def cmd_index(ctx: Context, args: argparse.Namespace) -> None:
    index(ctx)


def cmd_labels(ctx: Context, args: argparse.Namespace) -> None:
    path = ctx.config.outputs.normalized if args.normalized else ctx.config.outputs.index
    table = read_index(path)
    for label in get_labels(table, args.column):
        print(label)
    print(f"missing: {count_missing(table, args.column)}")


def cmd_normalize(ctx: Context, args: argparse.Namespace) -> None:
    normalize(ctx, read_index(ctx.config.outputs.index))


def cmd_run(ctx: Context, args: argparse.Namespace) -> None:
    fetch(ctx, screen(ctx, scan(ctx)))
    table = index(ctx)
    if not ctx.dry_run:
        table = read_index(ctx.config.outputs.index)
    normalize(ctx, table)


type Command = Callable[[Context, argparse.Namespace], None]


def _global_options() -> argparse.ArgumentParser:
    # Defaults are suppressed so that options given before and after the
    # subcommand merge and absent ones never override the config file.
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parser.add_argument("--config", type=Path, help="Pipeline config file (TOML)")
    parser.add_argument("--mirror", type=str, help="Local mirror root directory")
    parser.add_argument("--base-host", type=str, help="Host serving the collections")
    parser.add_argument("--collection", type=str, help="Collection name, e.g. childes")
    parser.add_argument(
        "--dataset",
        dest="datasets",
        action="append",
        help="Dataset name, e.g. Eng-NA (repeatable)",
    )
    parser.add_argument("--screening", type=str, help="Screening criteria text")
    parser.add_argument("--target", type=str, help="Target criteria text")
    parser.add_argument("--focus", type=str, help="Focus speaker code (default: CHI)")
    parser.add_argument("--parallelism", type=int, help="Concurrent corpora or files")
    parser.add_argument(
        "--strict", action="store_true", help="Fail on malformed header lines"
    )
    parser.add_argument(
        "--dry-run", action="store_true", help="Perform no writes and no downloads"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    options = _global_options()
    parser = argparse.ArgumentParser(
        prog="talkbank-harvest",
        description="Harvest, index and curate CHAT corpora from TalkBank.",
        parents=[options],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, command: Command, summary: str) -> argparse.ArgumentParser:
        subparser = subparsers.add_parser(name, parents=[options], help=summary)
        subparser.set_defaults(handler=command)
        return subparser

    add("scan", cmd_scan, "List the corpus archives of the datasets")
    add("screen", cmd_screen, "Select corpora with at least one matching file")
    add("fetch", cmd_fetch, "Download and extract the selected corpora")
    add("index", cmd_index, "Index matching files of the mirror")
    labels = add("labels", cmd_labels, "Show the distinct labels of a column")
    labels.add_argument("column", choices=COLUMNS, help="Index column")
    labels.add_argument(
        "--normalized",
        action="store_true",
        default=False,
        help="Read the normalized index instead of the raw one",
    )
    add("normalize", cmd_normalize, "Clean labels and add participant ids")
    add("run", cmd_run, "Run every step in order")
    return parser


_OVERRIDE_KEYS = (
    "mirror",
    "base_host",
    "collection",
    "datasets",
    "focus",
    "parallelism",
    "strict",
)


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = vars(args)
    overrides = {key: values[key] for key in _OVERRIDE_KEYS if key in values}
    criteria = {key: values[key] for key in ("screening", "target") if key in values}
    if criteria:
        overrides["criteria"] = criteria
    return overrides


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface.

    Args:
        argv: Arguments without the program name. Defaults to ``sys.argv``.

    Returns:
        The exit code.
    """
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(getattr(args, "verbose", False))
    logger = logging.getLogger(__name__)

    try:
        config = load_config(getattr(args, "config", None), _overrides(args))
        ctx = Context(
            config=config,
            fetcher=RequestsPageFetcher(timeout=config.timeout),
            dry_run=getattr(args, "dry_run", False),
        )
        handler: Command = args.handler
        handler(ctx, args)
    except (ConfigError, RuleSetError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except (
        FetchError,
        ArchiveError,
        ScreeningError,
        HeaderParseError,
        OSError,
        ValueError,
    ) as e:
        logger.error(f"step={args.command}: {e}")
        return EXIT_FAILURE
    return EXIT_OK
