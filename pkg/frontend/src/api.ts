/**
 * Typed client for the service's REST + SSE surface. Every non-2xx
 * response becomes an ApiError carrying the server's machine-readable
 * error code, so callers branch on `code`, never on prose.
 */

import { byteChunks, sseEvents } from "./sse.js";
import type {
  IngestJobPayload,
  SessionPayload,
  StreamEvent,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: typeof fetch;

  constructor(baseUrl: string, fetchImpl: typeof fetch = fetch) {
    this.baseUrl = baseUrl.endsWith("/") ? baseUrl.slice(0, -1) : baseUrl;
    this.fetchImpl = fetchImpl;
  }

  private async errorFrom(response: Response): Promise<ApiError> {
    let code = `http_${response.status}`;
    let message = response.statusText || `HTTP ${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body.code === "string") code = body.code;
      if (body && typeof body.message === "string") message = body.message;
    } catch {
      // non-JSON error body; keep the HTTP-level fallback
    }
    return new ApiError(response.status, code, message);
  }

  private async request(method: string, path: string, body?: unknown): Promise<any> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) throw await this.errorFrom(response);
    return response.json();
  }

  createSession(): Promise<SessionPayload> {
    return this.request("POST", "/sessions");
  }

  getSession(sessionId: string): Promise<SessionPayload> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  putSources(sessionId: string, config: Record<string, unknown>): Promise<SessionPayload> {
    return this.request("PUT", `/sessions/${sessionId}/sources`, config);
  }

  startIngest(sessionId: string): Promise<IngestJobPayload> {
    return this.request("POST", `/sessions/${sessionId}/ingest`);
  }

  getJob(jobId: string): Promise<IngestJobPayload> {
    return this.request("GET", `/ingest/${jobId}`);
  }

  /**
   * Open the streaming chat and feed each event to `onEvent` as it
   * arrives. Resolves when the server closes the stream; terminal
   * outcomes (done / error) travel inside the events themselves.
   * Pre-flight failures (unknown session, chat already running, …)
   * arrive as plain HTTP errors and are thrown as ApiError.
   */
  async streamChat(
    sessionId: string,
    message: string,
    onEvent: (event: StreamEvent) => void,
  ): Promise<void> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${sessionId}/chat?stream=true`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ message }),
      },
    );
    if (!response.ok) throw await this.errorFrom(response);
    if (!response.body) throw new ApiError(0, "empty_stream", "response had no body");
    for await (const event of sseEvents(byteChunks(response.body))) {
      onEvent(event);
    }
  }
}
