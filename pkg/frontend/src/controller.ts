/**
 * Async glue between the API client and the pure state machine: each
 * controller method runs one UI flow (create session, save-and-ingest,
 * send a chat) and feeds every outcome through `reduce`. The DOM layer
 * only subscribes and re-renders; tests drive the controller headless.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  canSend,
  formToPayload,
  initialState,
  reduce,
  type SourceForm,
  type UiEvent,
  type UiState,
} from "./state.js";
import type { StreamEvent } from "./types.js";

const DEFAULT_POLL_MS = 250;

export interface ControllerOptions {
  /** Ingest-job polling interval; tests shrink it. */
  pollIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
  /** Tap on raw stream events, before they reach the reducer. */
  onStreamEvent?: (event: StreamEvent) => void;
}

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

function asApiError(error: unknown): ApiError {
  if (error instanceof ApiError) return error;
  const message = error instanceof Error ? error.message : String(error);
  return new ApiError(0, "network_error", message);
}

export class UiController {
  state: UiState = initialState();

  private readonly api: ApiClient;
  private readonly pollIntervalMs: number;
  private readonly sleep: (ms: number) => Promise<void>;
  private readonly onStreamEvent?: (event: StreamEvent) => void;
  private readonly listeners: Array<(state: UiState) => void> = [];

  constructor(api: ApiClient, options: ControllerOptions = {}) {
    this.api = api;
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_MS;
    this.sleep = options.sleep ?? defaultSleep;
    this.onStreamEvent = options.onStreamEvent;
  }

  subscribe(listener: (state: UiState) => void): void {
    this.listeners.push(listener);
  }

  private dispatch(event: UiEvent): void {
    this.state = reduce(this.state, event);
    for (const listener of this.listeners) listener(this.state);
  }

  async init(): Promise<string> {
    const session = await this.api.createSession();
    this.dispatch({ type: "session_created", id: session.id });
    return session.id;
  }

  /** PUT the form, then run ingest to a terminal badge. Returns true when
   * at least part of the corpus was indexed. */
  async configureSources(form: SourceForm): Promise<boolean> {
    const sessionId = this.state.sessionId;
    if (!sessionId || this.state.ingestRunning || this.state.inFlight) return false;
    for (const field of Object.keys(form) as Array<keyof SourceForm>) {
      this.dispatch({ type: "form_changed", field, value: form[field] });
    }
    this.dispatch({ type: "save_started" });

    let saved;
    try {
      saved = await this.api.putSources(sessionId, formToPayload(form));
    } catch (error) {
      const apiError = asApiError(error);
      this.dispatch({ type: "save_rejected", code: apiError.code, message: apiError.message });
      return false;
    }
    this.dispatch({ type: "saved", config: saved.source_config });

    let job;
    try {
      job = await this.api.startIngest(sessionId);
      this.dispatch({ type: "ingest_update", job });
      while (job.state === "queued" || job.state === "running") {
        await this.sleep(this.pollIntervalMs);
        job = await this.api.getJob(job.job_id);
        this.dispatch({ type: "ingest_update", job });
      }
    } catch (error) {
      this.dispatch({ type: "ingest_failed", message: asApiError(error).message });
      return false;
    }
    return job.state === "done" || job.state === "partial";
  }

  /** Open the chat stream for one message; no-op while ineligible. */
  async send(text: string): Promise<void> {
    const trimmed = text.trim();
    const sessionId = this.state.sessionId;
    if (!trimmed || !sessionId || !canSend(this.state)) return;
    this.dispatch({ type: "send", text: trimmed });
    try {
      await this.api.streamChat(sessionId, trimmed, (event) => {
        this.onStreamEvent?.(event);
        this.dispatch({ type: "stream", event });
      });
      if (this.state.inFlight) {
        // stream closed without a done or error event
        this.dispatch({
          type: "stream_failed",
          code: "stream_closed",
          message: "the answer stream ended early",
        });
      }
    } catch (error) {
      const apiError = asApiError(error);
      this.dispatch({
        type: "stream_failed",
        code: apiError.code,
        message: apiError.message,
      });
    }
  }

  /** Re-send the question behind the most recent error bubble. */
  async retryLastError(): Promise<void> {
    for (let i = this.state.messages.length - 1; i >= 0; i--) {
      const message = this.state.messages[i];
      if (message.role === "error") {
        if (message.retryText) await this.send(message.retryText);
        return;
      }
    }
  }
}
