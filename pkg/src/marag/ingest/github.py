"""Repository content retrieval via the GitHub REST API.

Pulls three artifact classes from one repository: text files from the
default branch, issue threads, and pull-request threads. The API base URL
is injectable so tests run against a local stub; a static token, when
provided, is sent as a bearer Authorization header.
"""

from __future__ import annotations

import base64
import time
from typing import Any, Callable, Iterable
from urllib.parse import urlsplit

import httpx

from marag.errors import (
    AuthRequired,
    InvalidUrl,
    RateLimited,
    RepoNotFound,
    UpstreamUnreachable,
)
from marag.httpclient import HttpSettings, request_with_retries
from marag.index.records import SourceKind
from marag.ingest.documents import RawDocument

_BINARY_EXTENSIONS = {
    ".png", ".jpg", ".jpeg", ".gif", ".webp", ".ico", ".bmp", ".tiff",
    ".pdf", ".zip", ".gz", ".bz2", ".xz", ".tar", ".7z", ".rar",
    ".so", ".dylib", ".dll", ".exe", ".bin", ".o", ".a", ".obj",
    ".pyc", ".pyo", ".class", ".jar", ".war", ".whl",
    ".woff", ".woff2", ".ttf", ".otf", ".eot",
    ".mp3", ".mp4", ".wav", ".ogg", ".avi", ".mov", ".mkv", ".flac",
    ".db", ".sqlite", ".parquet",
}


def parse_repo_url(repo_url: str) -> tuple[str, str]:
    """Owner and repository name from a repository URL."""
    parts = urlsplit(repo_url)
    if parts.scheme not in ("http", "https") or not parts.hostname:
        raise InvalidUrl(f"not a repository URL: {repo_url!r}")
    segments = [s for s in parts.path.split("/") if s]
    if len(segments) < 2:
        raise InvalidUrl(f"repository URL must name owner/repo: {repo_url!r}")
    owner, repo = segments[0], segments[1]
    if repo.endswith(".git"):
        repo = repo[:-4]
    return owner, repo


def looks_binary_path(path: str) -> bool:
    dot = path.rfind(".")
    return dot != -1 and path[dot:].lower() in _BINARY_EXTENSIONS


class GithubClient:
    """Thin client over the handful of GitHub endpoints ingestion needs."""

    def __init__(
        self,
        api_base: str = "https://api.github.com",
        token: str | None = None,
        *,
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        headers = {"Accept": "application/vnd.github+json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        self._settings = settings
        self._sleep = sleep
        self._client = httpx.Client(
            base_url=api_base.rstrip("/"), headers=headers, timeout=settings.timeout
        )

    def close(self) -> None:
        self._client.close()

    def _get(self, path: str, params: dict[str, Any] | None = None) -> Any:
        try:
            response = request_with_retries(
                self._client, "GET", path, settings=self._settings, sleep=self._sleep, params=params
            )
        except httpx.TransportError as exc:
            raise UpstreamUnreachable(f"repository API unreachable: {exc}") from exc
        if response.status_code == 404:
            raise RepoNotFound(f"not found: {path}")
        if response.status_code in (401, 403):
            raise AuthRequired(f"repository API denied access ({response.status_code}): {path}")
        if response.status_code == 429:
            raise RateLimited("repository API rate limit")
        if response.status_code != 200:
            raise UpstreamUnreachable(f"repository API returned {response.status_code}: {path}")
        return response.json()

    def _get_paginated(self, path: str, params: dict[str, Any]) -> list[dict]:
        items: list[dict] = []
        page = 1
        while True:
            batch = self._get(path, {**params, "per_page": 100, "page": page})
            if not isinstance(batch, list) or not batch:
                break
            items.extend(batch)
            if len(batch) < 100:
                break
            page += 1
        return items

    def default_branch(self, owner: str, repo: str) -> str:
        info = self._get(f"/repos/{owner}/{repo}")
        return info.get("default_branch") or "main"

    def list_files(self, owner: str, repo: str, branch: str) -> list[str]:
        tree = self._get(f"/repos/{owner}/{repo}/git/trees/{branch}", {"recursive": "1"})
        return [
            entry["path"]
            for entry in tree.get("tree", [])
            if entry.get("type") == "blob"
        ]

    def file_text(self, owner: str, repo: str, path: str, branch: str) -> str | None:
        """Decoded file content, or None when the file is binary."""
        payload = self._get(f"/repos/{owner}/{repo}/contents/{path}", {"ref": branch})
        if payload.get("encoding") == "base64":
            raw = base64.b64decode(payload.get("content") or "", validate=False)
        else:
            raw = str(payload.get("content") or "").encode("utf-8")
        if b"\x00" in raw:
            return None
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            return None

    def issues(self, owner: str, repo: str) -> list[dict]:
        """All issues, excluding pull requests (the issues endpoint lists both)."""
        items = self._get_paginated(f"/repos/{owner}/{repo}/issues", {"state": "all"})
        return [item for item in items if "pull_request" not in item]

    def pulls(self, owner: str, repo: str) -> list[dict]:
        return self._get_paginated(f"/repos/{owner}/{repo}/pulls", {"state": "all"})

    def comments(self, owner: str, repo: str, number: int) -> list[dict]:
        return self._get_paginated(f"/repos/{owner}/{repo}/issues/{number}/comments", {})


def _thread_body(item: dict, comments: Iterable[dict]) -> str:
    """One plain-text document for an issue/PR thread: title, opening post,
    then comments in chronological order, each prefixed by its author."""
    author = (item.get("user") or {}).get("login", "unknown")
    lines = [f"#{item.get('number')} {item.get('title', '')}".strip()]
    body = (item.get("body") or "").strip()
    lines.append(f"{author}: {body}" if body else f"{author}:")
    ordered = sorted(comments, key=lambda c: c.get("created_at") or "")
    for comment in ordered:
        handle = (comment.get("user") or {}).get("login", "unknown")
        text = (comment.get("body") or "").strip()
        lines.append(f"{handle}: {text}")
    return "\n\n".join(lines)


def fetch_github_content(
    repo_url: str,
    content_types: Iterable[str],
    *,
    api_base: str = "https://api.github.com",
    token: str | None = None,
    settings: HttpSettings = HttpSettings(),
    sleep: Callable[[float], None] = time.sleep,
) -> list[RawDocument]:
    """Fetch the selected artifact classes from one repository.

    Returns one RawDocument per text file (for ``code``) and one per thread
    (for ``issue`` / ``pull_request``); binary and empty files are skipped.
    """
    owner, repo = parse_repo_url(repo_url)
    wanted = set(content_types)
    client = GithubClient(api_base, token, settings=settings, sleep=sleep)
    documents: list[RawDocument] = []
    try:
        if "code" in wanted:
            branch = client.default_branch(owner, repo)
            for path in client.list_files(owner, repo, branch):
                if looks_binary_path(path):
                    continue
                text = client.file_text(owner, repo, path, branch)
                if text and text.strip():
                    documents.append(
                        RawDocument(
                            kind=SourceKind.CODE,
                            source_url=repo_url,
                            body=text,
                            path=path,
                            artifact_class="code",
                        )
                    )
        if "issue" in wanted:
            for item in client.issues(owner, repo):
                number = int(item["number"])
                comments = client.comments(owner, repo, number) if item.get("comments") else []
                documents.append(
                    RawDocument(
                        kind=SourceKind.CODE,
                        source_url=repo_url,
                        body=_thread_body(item, comments),
                        path=f"issues/{number}",
                        artifact_class="issue",
                    )
                )
        if "pull_request" in wanted:
            for item in client.pulls(owner, repo):
                number = int(item["number"])
                comments = client.comments(owner, repo, number) if item.get("comments") else []
                documents.append(
                    RawDocument(
                        kind=SourceKind.CODE,
                        source_url=repo_url,
                        body=_thread_body(item, comments),
                        path=f"pull/{number}",
                        artifact_class="pull_request",
                    )
                )
    finally:
        client.close()
    return documents
