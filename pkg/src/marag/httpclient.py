"""Shared outbound-HTTP plumbing: one retry policy for every client.

Transient failures — transport errors, timeouts, 429, 5xx — are retried up
to ``attempts`` times with exponential backoff. The final response is
returned whatever its status; callers map statuses to their own errors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import httpx


@dataclass(frozen=True)
class HttpSettings:
    timeout: float = 10.0
    attempts: int = 3
    backoff_base: float = 0.5
    backoff_factor: float = 2.0

    def backoff_for(self, attempt: int) -> float:
        """Delay before attempt N (1-based; attempt 1 has no delay)."""
        return self.backoff_base * self.backoff_factor ** (attempt - 2)


def retryable_status(status: int) -> bool:
    return status == 429 or status >= 500


def request_with_retries(
    client: httpx.Client,
    method: str,
    url: str,
    *,
    settings: HttpSettings = HttpSettings(),
    sleep: Callable[[float], None] = time.sleep,
    **kwargs,
) -> httpx.Response:
    last_exc: Exception | None = None
    for attempt in range(1, settings.attempts + 1):
        if attempt > 1:
            sleep(settings.backoff_for(attempt))
        try:
            response = client.request(method, url, **kwargs)
        except httpx.TransportError as exc:
            last_exc = exc
            continue
        if retryable_status(response.status_code) and attempt < settings.attempts:
            continue
        return response
    assert last_exc is not None
    raise last_exc
