"""Live web retrieval for the internet agent.

A pluggable search provider returns {title, url, snippet} triples over a
trivial HTTP interface (``GET {base}/search?q=...&count=n``); each hit's
page is then fetched and run through the same HTML extractor the docs
crawler uses. Nothing here touches the vector index — web content lives
only for the duration of one query.
"""

from __future__ import annotations

import time
from typing import Callable

import httpx

from marag.errors import SearchProviderError
from marag.httpclient import HttpSettings, request_with_retries
from marag.index.records import SourceKind
from marag.ingest.documents import RawDocument
from marag.ingest.htmltext import extract_page
from marag.agents.types import WebSearchResult

DEFAULT_RESULTS = 3


class SearchClient:
    """Client for the search-provider HTTP interface."""

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        *,
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._settings = settings
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"), headers=headers, timeout=settings.timeout
        )

    def close(self) -> None:
        self._client.close()

    def search(self, query: str, n: int = DEFAULT_RESULTS) -> list[WebSearchResult]:
        try:
            response = request_with_retries(
                self._client,
                "GET",
                "/search",
                settings=self._settings,
                sleep=self._sleep,
                params={"q": query, "count": n},
            )
        except httpx.TransportError as exc:
            raise SearchProviderError(f"search provider unreachable: {exc}") from exc
        if response.status_code != 200:
            raise SearchProviderError(f"search provider returned {response.status_code}")
        try:
            payload = response.json()
            results = [
                WebSearchResult(
                    title=str(item.get("title", "")),
                    url=str(item["url"]),
                    snippet=str(item.get("snippet", "")),
                )
                for item in payload.get("results", [])[:n]
            ]
        except (KeyError, ValueError, TypeError) as exc:
            raise SearchProviderError(f"malformed search response: {exc}") from exc
        return results


def web_retrieve(
    search: SearchClient,
    query_text: str,
    n: int = DEFAULT_RESULTS,
    *,
    settings: HttpSettings = HttpSettings(),
    sleep: Callable[[float], None] = time.sleep,
) -> list[RawDocument]:
    """Search, fetch the top-n result pages, extract their text.

    Pages that fail to fetch or yield no text are skipped; the list may be
    shorter than n (empty when every page failed)."""
    results = search.search(query_text, n)
    documents: list[RawDocument] = []
    with httpx.Client(timeout=settings.timeout, follow_redirects=True) as client:
        for result in results:
            try:
                response = request_with_retries(
                    client, "GET", result.url, settings=settings, sleep=sleep
                )
            except httpx.TransportError:
                continue
            if response.status_code != 200:
                continue
            page = extract_page(response.text, result.url)
            body = page.text or result.snippet
            if not body.strip():
                continue
            documents.append(
                RawDocument(
                    kind=SourceKind.WEB,
                    source_url=result.url,
                    body=body,
                    page_url=result.url,
                    headings=tuple(page.headings),
                )
            )
    return documents
