"""marag — a multi-agent retrieval-augmented generation service.

Ingests a YouTube tutorial, a GitHub repository, and a documentation site
into a per-session vector index, then answers conversational questions by
fanning a query out to four specialized agents (video, code, documentation,
internet) whose answers a manager merges into one cited response.
"""

__version__ = "0.1.0"
