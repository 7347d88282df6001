"""Bounded breadth-first crawl of a documentation site.

Scope is the root URL's origin plus its path prefix, so a docs root like
``https://host/guide/`` never leads the crawler off into the rest of the
site (or the web). URLs are canonicalized by stripping fragments and are
visited at most once. A failing root is fatal; a failing inner page is
reported through ``on_error`` and skipped.
"""

from __future__ import annotations

import time
from collections import deque
from typing import Callable

import httpx

from marag.errors import UpstreamUnreachable
from marag.httpclient import HttpSettings, request_with_retries
from marag.index.records import SourceKind
from marag.ingest.documents import Heading, RawDocument
from marag.ingest.htmltext import extract_page

OnError = Callable[[str, str, str], None]  # (url, error_code, message)


def _canonical(url: str) -> str:
    return url.split("#", 1)[0]


def _scope_prefix(root_url: str) -> str:
    """Origin + directory of the root URL; everything under it is in scope."""
    base = _canonical(root_url)
    scheme_sep = base.find("://")
    path_start = base.find("/", scheme_sep + 3) if scheme_sep != -1 else -1
    if path_start == -1:
        return base + "/"
    origin, path = base[:path_start], base[path_start:]
    if not path.endswith("/"):
        path = path[: path.rfind("/") + 1]
    return origin + path


def _in_scope(url: str, prefix: str, root: str) -> bool:
    return url == root or url.startswith(prefix)


def _looks_like_html(response: httpx.Response) -> bool:
    ctype = response.headers.get("content-type", "")
    return "text/html" in ctype or ctype == "" or ctype.startswith("text/")


def crawl_docs(
    root_url: str,
    crawl_limit: int,
    *,
    settings: HttpSettings = HttpSettings(),
    sleep: Callable[[float], None] = time.sleep,
    on_error: OnError | None = None,
) -> list[RawDocument]:
    """Fetch up to ``crawl_limit`` pages breadth-first starting at the root.

    Returns one RawDocument per page that yielded non-empty text. Raises
    UpstreamUnreachable only if the root itself cannot be fetched.
    """
    root = _canonical(root_url)
    prefix = _scope_prefix(root)
    queue: deque[str] = deque([root])
    enqueued = {root}
    documents: list[RawDocument] = []
    fetched = 0

    with httpx.Client(timeout=settings.timeout, follow_redirects=True) as client:
        while queue and fetched < crawl_limit:
            url = queue.popleft()
            is_root = url == root
            try:
                response = request_with_retries(client, "GET", url, settings=settings, sleep=sleep)
            except httpx.TransportError as exc:
                if is_root:
                    raise UpstreamUnreachable(f"docs root unreachable: {exc}") from exc
                if on_error:
                    on_error(url, "upstream_unreachable", str(exc))
                continue
            if response.status_code != 200:
                message = f"status {response.status_code} fetching {url}"
                if is_root:
                    raise UpstreamUnreachable(message)
                if on_error:
                    on_error(url, "upstream_unreachable", message)
                continue
            fetched += 1
            if not _looks_like_html(response):
                continue

            page = extract_page(response.text, url)
            for link in page.links:
                link = _canonical(link)
                if link.startswith(("http://", "https://")) and _in_scope(link, prefix, root):
                    if link not in enqueued:
                        enqueued.add(link)
                        queue.append(link)

            body = page.text
            headings = list(page.headings)
            if page.title and not body.startswith(page.title):
                shift = len(page.title) + 2
                body = page.title + "\n\n" + body if body else page.title
                headings = [Heading(h.offset + shift, h.level, h.text) for h in headings]
            if body.strip():
                documents.append(
                    RawDocument(
                        kind=SourceKind.DOCUMENTATION,
                        source_url=root_url,
                        body=body,
                        page_url=url,
                        headings=tuple(headings),
                    )
                )
    return documents
