"""Repository ingestion: URL parsing, artifact classes, API error mapping."""

import pytest

from stubs import REPO_URL, RepoFixture
from marag.errors import AuthRequired, InvalidUrl, RateLimited, RepoNotFound, UpstreamUnreachable
from marag.index.records import SourceKind
from marag.ingest.github import (
    fetch_github_content,
    looks_binary_path,
    parse_repo_url,
)


class TestParseRepoUrl:
    @pytest.mark.parametrize(
        "url,expected",
        [
            ("https://github.com/acme/crewkit", ("acme", "crewkit")),
            ("https://github.com/acme/crewkit.git", ("acme", "crewkit")),
            ("https://github.com/acme/crewkit/tree/main/src", ("acme", "crewkit")),
            ("http://git.internal.example/acme/crewkit", ("acme", "crewkit")),
        ],
    )
    def test_accepts(self, url, expected):
        assert parse_repo_url(url) == expected

    @pytest.mark.parametrize(
        "url", ["notaurl", "https://github.com/onlyowner", "ftp://github.com/a/b"]
    )
    def test_rejects(self, url):
        with pytest.raises(InvalidUrl):
            parse_repo_url(url)


class TestBinaryDetection:
    def test_by_extension(self):
        assert looks_binary_path("img/logo.png")
        assert looks_binary_path("dist/app.WHL")
        assert not looks_binary_path("src/main.py")
        assert not looks_binary_path("Makefile")


class TestFetchContent:
    def fetch(self, server, content_types, fast_http, no_sleep, url=REPO_URL):
        return fetch_github_content(
            url,
            content_types,
            api_base=server.url("/gh"),
            settings=fast_http,
            sleep=no_sleep,
        )

    def test_code_skips_binary_files(self, server, fast_http, no_sleep):
        documents = self.fetch(server, {"code"}, fast_http, no_sleep)
        assert {doc.path for doc in documents} == {"README.md", "tools/custom_tool.py"}
        assert all(doc.kind == SourceKind.CODE for doc in documents)
        assert all(doc.artifact_class == "code" for doc in documents)
        tool = next(d for d in documents if d.path.endswith("custom_tool.py"))
        assert "class WordCountTool(BaseTool)" in tool.body

    def test_null_byte_sniff_skips_misnamed_binaries(self, server, fast_http, no_sleep):
        server.repos["acme/crewkit"].files["data.txt"] = b"looks like text\x00but is not"
        documents = self.fetch(server, {"code"}, fast_http, no_sleep)
        assert "data.txt" not in {doc.path for doc in documents}

    def test_undecodable_files_are_skipped(self, server, fast_http, no_sleep):
        server.repos["acme/crewkit"].files["latin.txt"] = b"caf\xe9 non-utf8"
        documents = self.fetch(server, {"code"}, fast_http, no_sleep)
        assert "latin.txt" not in {doc.path for doc in documents}

    def test_issues_exclude_pull_requests(self, server, fast_http, no_sleep):
        documents = self.fetch(server, {"issue"}, fast_http, no_sleep)
        assert {doc.path for doc in documents} == {"issues/1", "issues/2"}
        assert all(doc.artifact_class == "issue" for doc in documents)

    def test_issue_thread_contains_comments_in_order(self, server, fast_http, no_sleep):
        documents = self.fetch(server, {"issue"}, fast_http, no_sleep)
        thread = next(d for d in documents if d.path == "issues/1")
        assert thread.body.startswith("#1 How do I create a custom tool?")
        assert "alice: The docs mention BaseTool" in thread.body
        first = thread.body.index("dana: Subclass BaseTool")
        second = thread.body.index("alice: That worked, thanks!")
        assert first < second

    def test_pull_requests(self, server, fast_http, no_sleep):
        documents = self.fetch(server, {"pull_request"}, fast_http, no_sleep)
        assert [doc.path for doc in documents] == ["pull/3"]
        assert documents[0].artifact_class == "pull_request"
        assert "#3 Add a word-count example tool" in documents[0].body

    def test_empty_repo_yields_nothing(self, server, fast_http, no_sleep):
        server.repos["acme/empty"] = RepoFixture()
        documents = self.fetch(
            server,
            {"code", "issue", "pull_request"},
            fast_http,
            no_sleep,
            url="https://github.com/acme/empty",
        )
        assert documents == []

    def test_unknown_repo_raises_repo_not_found(self, server, fast_http, no_sleep):
        with pytest.raises(RepoNotFound):
            self.fetch(server, {"code"}, fast_http, no_sleep, url="https://github.com/no/such")

    @pytest.mark.parametrize("status,expected", [(401, AuthRequired), (403, AuthRequired)])
    def test_denied_access_raises_auth_required(
        self, server, fast_http, no_sleep, status, expected
    ):
        server.status_overrides["/gh"] = status
        with pytest.raises(expected):
            self.fetch(server, {"code"}, fast_http, no_sleep)

    def test_rate_limit(self, server, fast_http, no_sleep):
        server.status_overrides["/gh"] = 429
        with pytest.raises(RateLimited):
            self.fetch(server, {"code"}, fast_http, no_sleep)

    def test_server_error_is_upstream_unreachable(self, server, fast_http, no_sleep):
        server.status_overrides["/gh"] = 502
        with pytest.raises(UpstreamUnreachable):
            self.fetch(server, {"code"}, fast_http, no_sleep)

    def test_token_is_sent_as_bearer(self, server, fast_http, no_sleep):
        fetch_github_content(
            REPO_URL,
            {"code"},
            api_base=server.url("/gh"),
            token="gh-token",
            settings=fast_http,
            sleep=no_sleep,
        )
        assert all(e["auth"] == "Bearer gh-token" for e in server.requests_to("/gh"))
