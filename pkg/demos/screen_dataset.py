#!/usr/bin/env python
"""Demo script for screening a TalkBank dataset.

This script lists the corpus archives of one dataset and reports which
corpora contain at least one transcript matching a filter expression,
without writing anything to disk.
"""

import argparse
import logging

from talkbank_harvest.criteria import format_expr, parse_expr
from talkbank_harvest.harvest import RetryPolicy, screen_dataset
from talkbank_harvest.remote import RequestsPageFetcher, dataset_url, scan_zip_urls

DEFAULT_CRITERIA = (
    "exists(CHI) and (nonempty(CHI.ses) or (exists(MOT) and nonempty(MOT.ses)) "
    "or (exists(MOT) and nonempty(MOT.education)))"
)


def setup_logging() -> None:
    """Configure logging for the demo."""
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[logging.StreamHandler()],
    )


def parse_args() -> argparse.Namespace:
    """Parse command line arguments.

    Returns:
        Parsed command line arguments.
    """
    parser = argparse.ArgumentParser(description="Demo for screening a TalkBank dataset")
    parser.add_argument(
        "--collection",
        type=str,
        default="childes",
        help="Collection name (default: childes)",
    )
    parser.add_argument(
        "--dataset", type=str, default="Eng-NA", help="Dataset name (default: Eng-NA)"
    )
    parser.add_argument(
        "--criteria",
        type=str,
        default=DEFAULT_CRITERIA,
        help="Filter expression (default: child with SES information)",
    )
    parser.add_argument(
        "--base-host",
        type=str,
        default=None,
        help="Host serving the collections, e.g. localhost:8000 for a local copy",
    )
    parser.add_argument(
        "--parallelism",
        type=int,
        default=4,
        help="Number of corpora screened concurrently (default: 4)",
    )
    parser.add_argument(
        "--limit",
        type=int,
        default=None,
        help="Only screen the first N corpora",
    )
    return parser.parse_args()


def main() -> None:
    """Run the screening demo."""
    setup_logging()
    logger = logging.getLogger("screen-demo")
    args = parse_args()

    criteria = parse_expr(args.criteria)
    logger.info(f"Criteria: {format_expr(criteria)}")

    fetcher = RequestsPageFetcher(timeout=120.0)
    url = dataset_url(args.collection, args.dataset, args.base_host)
    sources = scan_zip_urls(
        url, fetcher, collection=args.collection, dataset=args.dataset, max_depth=0
    )
    if args.limit is not None:
        sources = sources[: args.limit]
    logger.info(f"Screening {len(sources)} corpora from {url}")

    results = screen_dataset(
        sources, criteria, fetcher, args.parallelism, retry=RetryPolicy(backoff=2.0)
    )
    for result in results:
        if result.error is not None:
            logger.warning(f"{result.source.corpus}: failed ({result.error})")
        elif result.selected:
            logger.info(
                f"{result.source.corpus}: selected, first match {result.first_match} "
                f"after {result.files_inspected} file(s)"
            )
        else:
            logger.info(
                f"{result.source.corpus}: skipped after {result.files_inspected} file(s)"
            )

    selected = [r.source.corpus for r in results if r.selected]
    logger.info(f"{len(selected)} of {len(results)} corpora selected: {', '.join(selected)}")


if __name__ == "__main__":
    main()
