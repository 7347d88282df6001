import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function clientReturning(response: Response, calls: Array<{ url: string; init?: RequestInit }> = []) {
  const fetchImpl: typeof fetch = async (input, init) => {
    calls.push({ url: String(input), init });
    return response;
  };
  return new ApiClient("http://service.test/", fetchImpl);
}

describe("ApiClient", () => {
  it("normalizes the base URL and decodes JSON", async () => {
    const calls: Array<{ url: string; init?: RequestInit }> = [];
    const client = clientReturning(jsonResponse(201, { id: "sess-1" }), calls);
    const session = await client.createSession();
    expect(session.id).toBe("sess-1");
    expect(calls[0].url).toBe("http://service.test/sessions");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("turns error bodies into typed ApiErrors", async () => {
    const client = clientReturning(
      jsonResponse(409, { code: "chat_in_flight", message: "a chat is already running" }),
    );
    const error = await client.startIngest("sess-1").catch((e) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect(error.status).toBe(409);
    expect(error.code).toBe("chat_in_flight");
    expect(error.message).toBe("a chat is already running");
  });

  it("falls back to an HTTP-level code for non-JSON errors", async () => {
    const client = clientReturning(new Response("boom", { status: 503 }));
    const error = await client.getSession("sess-1").catch((e) => e);
    expect(error.code).toBe("http_503");
  });

  it("delivers stream events in order", async () => {
    const frame =
      'event: routing\ndata: {"targets": ["internet"]}\n\n' +
      'event: delta\ndata: {"text": "hi"}\n\n' +
      'event: done\ndata: {"answer_text": "hi", "citations": [], "agent_reports": [], "degraded": false}\n\n';
    const client = clientReturning(
      new Response(frame, { status: 200, headers: { "content-type": "text/event-stream" } }),
    );
    const seen: string[] = [];
    await client.streamChat("sess-1", "q", (event) => seen.push(event.event));
    expect(seen).toEqual(["routing", "delta", "done"]);
  });

  it("throws the pre-flight error instead of opening a stream", async () => {
    const client = clientReturning(
      jsonResponse(409, { code: "session_not_ready", message: "ingest first" }),
    );
    const error = await client
      .streamChat("sess-1", "q", () => {
        throw new Error("no event expected");
      })
      .catch((e) => e);
    expect(error.code).toBe("session_not_ready");
  });
});
