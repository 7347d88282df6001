"""HTTP gateway against the stub provider: wire format, retries, error map."""

import pytest

from oracles import reference_mock_embedding
from marag.errors import ContextTooLarge, GatewayTimeout, ProviderError, RateLimited
from marag.gateway.base import ChatMessage, GenerationRequest
from marag.gateway.openai_http import OpenAIStyleGateway
from marag.httpclient import HttpSettings


REQUEST = GenerationRequest(
    messages=(ChatMessage("system", "s"), ChatMessage("user", "say something"))
)


@pytest.fixture
def http_gateway(server, fast_http, no_sleep):
    gateway = OpenAIStyleGateway(
        server.base_url,
        api_key="sk-test",
        chat_model="stub-chat",
        embed_model="stub-embed",
        embedding_dim=server.embed_dim,
        settings=fast_http,
        sleep=no_sleep,
    )
    yield gateway
    gateway.close()


class TestEmbeddings:
    def test_vectors_returned_in_input_order(self, http_gateway, server):
        # The stub answers with the data array reversed; ordering must come
        # from each item's index field.
        texts = ["first", "second", "third"]
        vectors = http_gateway.embed(texts)
        assert len(vectors) == 3
        for text, vec in zip(texts, vectors):
            assert list(vec.values) == pytest.approx(
                reference_mock_embedding(text, server.embed_dim)
            )

    def test_unexpected_dimension_is_a_provider_error(self, server, fast_http, no_sleep):
        gateway = OpenAIStyleGateway(
            server.base_url,
            embedding_dim=server.embed_dim + 3,
            settings=fast_http,
            sleep=no_sleep,
        )
        with pytest.raises(ProviderError):
            gateway.embed(["anything"])
        gateway.close()

    def test_sends_bearer_token(self, http_gateway, server):
        http_gateway.embed(["auth check"])
        (entry,) = server.requests_to("/v1/embeddings")
        assert entry["auth"] == "Bearer sk-test"
        assert entry["body"]["model"] == "stub-embed"


class TestGeneration:
    def test_non_stream_returns_content(self, http_gateway, server):
        server.chat_text = "a full completion"
        assert http_gateway.generate(REQUEST) == "a full completion"
        (entry,) = server.requests_to("/v1/chat/completions")
        assert entry["body"]["messages"][0] == {"role": "system", "content": "s"}
        assert entry["body"]["stream"] is False

    def test_stream_concatenates_to_full_text(self, http_gateway, server):
        server.chat_text = "streamed words arrive in little pieces"
        deltas = list(http_gateway.generate_stream(REQUEST))
        assert len(deltas) > 1
        assert "".join(deltas) == server.chat_text


class TestRetriesAndErrors:
    def test_transient_failures_are_retried(self, http_gateway, server):
        server.fail_remaining["/v1/chat/completions"] = 2
        assert http_gateway.generate(REQUEST) == server.chat_text
        assert len(server.requests_to("/v1/chat/completions")) == 3

    def test_stream_retries_transient_failures(self, http_gateway, server):
        server.fail_remaining["/v1/chat/completions"] = 1
        assert "".join(http_gateway.generate_stream(REQUEST)) == server.chat_text

    def test_persistent_rate_limit_raises_after_final_attempt(self, http_gateway, server):
        server.status_overrides["/v1/embeddings"] = 429
        with pytest.raises(RateLimited):
            http_gateway.embed(["text"])
        assert len(server.requests_to("/v1/embeddings")) == 3

    def test_persistent_server_error_raises_provider_error(self, http_gateway, server):
        server.status_overrides["/v1/chat/completions"] = 500
        with pytest.raises(ProviderError):
            http_gateway.generate(REQUEST)

    def test_context_overflow_maps_to_context_too_large(self, http_gateway, server):
        server.status_overrides["/v1/chat/completions"] = 400
        server.status_payloads["/v1/chat/completions"] = {
            "error": {"message": "This model's maximum context length is exceeded"}
        }
        with pytest.raises(ContextTooLarge):
            http_gateway.generate(REQUEST)

    def test_unreachable_provider_raises_provider_error(self, fast_http, no_sleep):
        gateway = OpenAIStyleGateway(
            "http://127.0.0.1:9", embedding_dim=8, settings=fast_http, sleep=no_sleep
        )
        with pytest.raises(ProviderError):
            gateway.embed(["text"])
        gateway.close()

    def test_slow_provider_raises_gateway_timeout(self, server, no_sleep):
        server.delays["/v1"] = 0.4
        gateway = OpenAIStyleGateway(
            server.base_url,
            embedding_dim=server.embed_dim,
            settings=HttpSettings(timeout=0.05, attempts=2, backoff_base=0.001),
            sleep=no_sleep,
        )
        with pytest.raises(GatewayTimeout):
            gateway.generate(REQUEST)
        gateway.close()
