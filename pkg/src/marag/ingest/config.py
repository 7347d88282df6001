"""Per-session source configuration.

A session's knowledge scope is at most three resources: a video URL, a
GitHub repository, and a documentation site root. GitHub sources can
additionally select which artifact classes to pull (code files, issues,
pull requests).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from marag.index.records import ARTIFACT_CLASSES

DEFAULT_CRAWL_LIMIT = 50


@dataclass(frozen=True)
class SourceConfig:
    youtube_url: str | None = None
    github_url: str | None = None
    docs_url: str | None = None
    github_content_types: tuple[str, ...] = ("code",)
    crawl_limit: int = DEFAULT_CRAWL_LIMIT

    def __post_init__(self):
        for name in ("youtube_url", "github_url", "docs_url"):
            value = getattr(self, name)
            if value is not None and (not isinstance(value, str) or not value.strip()):
                raise ValueError(f"{name} must be a non-empty string or None")
        if not isinstance(self.github_content_types, tuple):
            object.__setattr__(self, "github_content_types", tuple(self.github_content_types))
        bad = [c for c in self.github_content_types if c not in ARTIFACT_CLASSES]
        if bad:
            raise ValueError(
                f"invalid github content types {bad}; allowed: {list(ARTIFACT_CLASSES)}"
            )
        if self.github_url is not None and not self.github_content_types:
            raise ValueError("github_content_types must be non-empty when github_url is set")
        if self.crawl_limit <= 0:
            raise ValueError("crawl_limit must be positive")

    @property
    def any_configured(self) -> bool:
        return any((self.youtube_url, self.github_url, self.docs_url))

    def to_dict(self) -> dict:
        return {
            "youtube_url": self.youtube_url,
            "github_url": self.github_url,
            "docs_url": self.docs_url,
            "github_content_types": list(self.github_content_types),
            "crawl_limit": self.crawl_limit,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SourceConfig":
        return cls(
            youtube_url=data.get("youtube_url"),
            github_url=data.get("github_url"),
            docs_url=data.get("docs_url"),
            github_content_types=tuple(data.get("github_content_types") or ("code",)),
            crawl_limit=int(data.get("crawl_limit") or DEFAULT_CRAWL_LIMIT),
        )
