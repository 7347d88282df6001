"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so the HTTP layer,
the CLI, and agent failure reports can map errors without string matching.
"""

from __future__ import annotations


class MaragError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


# --- vector index ---------------------------------------------------------

class DimensionMismatch(MaragError):
    code = "dimension_mismatch"


class EmptyText(MaragError):
    code = "empty_text"


class CorruptFile(MaragError):
    code = "corrupt_file"


# --- ingestion ------------------------------------------------------------

class InvalidUrl(MaragError):
    code = "invalid_url"


class NoTranscriptAvailable(MaragError):
    code = "no_transcript"


class UpstreamUnreachable(MaragError):
    code = "upstream_unreachable"


class RateLimited(MaragError):
    code = "rate_limited"


class RepoNotFound(MaragError):
    code = "repo_not_found"


class AuthRequired(MaragError):
    code = "auth_required"


class EmptyDocument(MaragError):
    code = "empty_document"


# --- model gateway --------------------------------------------------------

class ProviderError(MaragError):
    code = "provider_error"


class GatewayTimeout(MaragError):
    code = "timeout"


class ContextTooLarge(MaragError):
    code = "context_too_large"


# --- agents ---------------------------------------------------------------

class NotIngested(MaragError):
    code = "not_ingested"


class SearchProviderError(MaragError):
    code = "search_provider_error"


# --- orchestrator ---------------------------------------------------------

class NoEligibleAgents(MaragError):
    code = "no_eligible_agents"


class AllAgentsFailed(MaragError):
    code = "all_agents_failed"


class SessionNotReady(MaragError):
    code = "session_not_ready"


# --- service --------------------------------------------------------------

class SessionNotFound(MaragError):
    code = "session_not_found"


class IngestRunning(MaragError):
    code = "ingest_running"


class JobNotFound(MaragError):
    code = "job_not_found"


class ChatInFlight(MaragError):
    code = "chat_in_flight"


class NoSources(MaragError):
    code = "no_sources"


class StorageError(MaragError):
    code = "storage_error"


def error_for_code(code: str, message: str = "") -> MaragError:
    """Reconstruct the error class for a machine code (inverse of ``.code``).
    Unknown codes fall back to the base class."""
    stack = [MaragError]
    while stack:
        cls = stack.pop()
        if cls.code == code:
            return cls(message)
        stack.extend(cls.__subclasses__())
    return MaragError(message or code)
