"""Retry policy for network operations."""

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

from ..remote import FetchError, ProtectedCollectionError


@dataclass(frozen=True)
class RetryPolicy:
    """Exponential backoff settings.

    Attributes:
        attempts: Total number of attempts, including the first one.
        backoff: Delay in seconds before the first retry.
        factor: Multiplier applied to the delay after each retry.
    """

    attempts: int = 3
    backoff: float = 1.0
    factor: float = 2.0

    def __post_init__(self) -> None:
        if self.attempts < 1:
            raise ValueError(f"attempts must be >= 1, got {self.attempts}.")
        if self.backoff < 0 or self.factor < 1:
            raise ValueError("backoff must be >= 0 and factor >= 1.")

    def delay(self, retry: int) -> float:
        """Delay before the given 1-based retry."""
        return self.backoff * self.factor ** (retry - 1)


def call_with_retry[T](
    action: Callable[[], T],
    policy: RetryPolicy,
    description: str,
    logger: logging.Logger,
) -> T:
    """Run ``action``, retrying on transient fetch failures.

    Authentication challenges and 4xx statuses are not retried.

    Raises:
        FetchError: The last failure once all attempts are used up.
    """
    for attempt in range(1, policy.attempts + 1):
        try:
            return action()
        except ProtectedCollectionError:
            raise
        except FetchError as e:
            if e.status is not None and 400 <= e.status < 500:
                raise
            if attempt == policy.attempts:
                raise
            delay = policy.delay(attempt)
            logger.warning(
                f"{description} failed ({e}), retrying ({attempt}/{policy.attempts - 1}) "
                f"in {delay:.1f}s..."
            )
            time.sleep(delay)
    raise AssertionError("unreachable")
