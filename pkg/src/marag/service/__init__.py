"""HTTP service: sessions, ingestion jobs, streaming chat, persistence."""

from marag.service.app import create_app
from marag.service.settings import ServiceSettings
from marag.service.state import ServiceState

__all__ = ["ServiceSettings", "ServiceState", "create_app"]
