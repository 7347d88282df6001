"""Service configuration, sourced from MARAG_* environment variables.

Every knob has a programmatic override so tests and the CLI can construct
settings directly; the environment is only a default source.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Mapping

_TRUTHY = ("1", "true", "yes", "on")


def _flag(value: str | None, default: bool = False) -> bool:
    if value is None:
        return default
    return value.strip().lower() in _TRUTHY


@dataclass(frozen=True)
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str = "./data"
    mock: bool = False

    # model provider
    provider_base_url: str = "https://api.openai.com"
    api_key: str | None = None
    chat_model: str = "gpt-4o-mini"
    embed_model: str = "text-embedding-3-small"
    embed_dim: int = 1536

    # source backends
    transcript_base_url: str = ""
    github_api_base: str = "https://api.github.com"
    github_token: str | None = None
    search_base_url: str = ""
    search_api_key: str | None = None
    internet_enabled: bool | None = None  # None -> enabled iff search_base_url set

    # orchestration tunables
    agent_timeout: float = 30.0
    synthesis_timeout: float = 60.0

    @property
    def internet_agent_enabled(self) -> bool:
        if self.internet_enabled is not None:
            return self.internet_enabled
        return bool(self.search_base_url) or self.mock

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None, **overrides) -> "ServiceSettings":
        env = os.environ if env is None else env
        internet = env.get("MARAG_INTERNET_ENABLED")
        settings = cls(
            host=env.get("MARAG_HOST", cls.host),
            port=int(env.get("MARAG_PORT", cls.port)),
            data_dir=env.get("MARAG_DATA_DIR", cls.data_dir),
            mock=_flag(env.get("MARAG_MOCK")),
            provider_base_url=env.get("MARAG_PROVIDER_BASE_URL", cls.provider_base_url),
            api_key=env.get("MARAG_API_KEY"),
            chat_model=env.get("MARAG_CHAT_MODEL", cls.chat_model),
            embed_model=env.get("MARAG_EMBED_MODEL", cls.embed_model),
            embed_dim=int(env.get("MARAG_EMBED_DIM", cls.embed_dim)),
            transcript_base_url=env.get("MARAG_TRANSCRIPT_BASE_URL", ""),
            github_api_base=env.get("MARAG_GITHUB_API_BASE", cls.github_api_base),
            github_token=env.get("MARAG_GITHUB_TOKEN"),
            search_base_url=env.get("MARAG_SEARCH_BASE_URL", ""),
            search_api_key=env.get("MARAG_SEARCH_API_KEY"),
            internet_enabled=None if internet is None else _flag(internet),
            agent_timeout=float(env.get("MARAG_AGENT_TIMEOUT", cls.agent_timeout)),
            synthesis_timeout=float(env.get("MARAG_SYNTHESIS_TIMEOUT", cls.synthesis_timeout)),
        )
        return replace(settings, **overrides) if overrides else settings
