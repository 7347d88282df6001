/**
 * The UI's entire state as one immutable value plus a pure reducer.
 * Two rules are load-bearing and enforced structurally here, not in the
 * DOM layer:
 *
 *   - never two chats in flight for the session: `send` events are
 *     dropped while one is open (the server would 409 anyway);
 *   - the finalized assistant text IS the done payload's answer_text —
 *     streamed deltas only paint the draft, they never become the
 *     message of record.
 */

import type {
  Citation,
  IngestErrorPayload,
  IngestJobPayload,
  SourceConfigPayload,
  StreamEvent,
} from "./types.js";

export type UrlField = "youtube_url" | "github_url" | "docs_url";
export type FormField = UrlField | "github_content_types" | "docs_crawl_limit";

export interface SourceForm {
  youtube_url: string;
  github_url: string;
  docs_url: string;
  github_content_types: string[];
  docs_crawl_limit: number | null;
}

export type Badge =
  | "unconfigured"
  | "queued"
  | "running"
  | "done"
  | "partial"
  | "failed";

export type ActivityPhase = "running" | "ok" | "failed";

export interface Activity {
  agent: string;
  phase: ActivityPhase;
  failure_reason: string | null;
}

export type Message =
  | { role: "user"; text: string }
  | { role: "assistant"; text: string; citations: Citation[]; degraded: boolean }
  | { role: "error"; code: string; message: string; retryText: string };

export interface UiState {
  sessionId: string | null;
  form: SourceForm;
  fieldErrors: Partial<Record<FormField | "form", string>>;
  badge: Badge;
  ingestErrors: IngestErrorPayload[];
  ingestRunning: boolean;
  messages: Message[];
  draft: string | null;
  activity: Activity[];
  inFlight: boolean;
}

export type UiEvent =
  | { type: "session_created"; id: string }
  | { type: "form_changed"; field: FormField; value: SourceForm[FormField] }
  | { type: "save_started" }
  | { type: "save_rejected"; code: string; message: string }
  | { type: "saved"; config: SourceConfigPayload }
  | { type: "ingest_update"; job: IngestJobPayload }
  | { type: "ingest_failed"; message: string }
  | { type: "send"; text: string }
  | { type: "stream"; event: StreamEvent }
  | { type: "stream_failed"; code: string; message: string };

export function emptyForm(): SourceForm {
  return {
    youtube_url: "",
    github_url: "",
    docs_url: "",
    github_content_types: ["code", "issue", "pull_request"],
    docs_crawl_limit: null,
  };
}

export function initialState(): UiState {
  return {
    sessionId: null,
    form: emptyForm(),
    fieldErrors: {},
    badge: "unconfigured",
    ingestErrors: [],
    ingestRunning: false,
    messages: [],
    draft: null,
    activity: [],
    inFlight: false,
  };
}

/** Chat input is available unless ingest is running or a chat is open. */
export function canSend(state: UiState): boolean {
  return state.sessionId !== null && !state.inFlight && !state.ingestRunning;
}

/** The server-validated config, echoed back into the form verbatim. */
function formFromConfig(config: SourceConfigPayload): SourceForm {
  return {
    youtube_url: config.youtube_url ?? "",
    github_url: config.github_url ?? "",
    docs_url: config.docs_url ?? "",
    github_content_types: [...config.github_content_types],
    docs_crawl_limit: config.docs_crawl_limit ?? null,
  };
}

/** The PUT /sources body for the current form: empty fields are omitted,
 * not sent as empty strings. */
export function formToPayload(form: SourceForm): Record<string, unknown> {
  const payload: Record<string, unknown> = {};
  const youtube = form.youtube_url.trim();
  const github = form.github_url.trim();
  const docs = form.docs_url.trim();
  if (youtube) payload.youtube_url = youtube;
  if (github) {
    payload.github_url = github;
    payload.github_content_types = [...form.github_content_types];
  }
  if (docs) {
    payload.docs_url = docs;
    if (form.docs_crawl_limit !== null) payload.docs_crawl_limit = form.docs_crawl_limit;
  }
  return payload;
}

/** Pin a rejected save onto the field whose value the server quoted;
 * anything unattributable becomes a form-level error. */
export function attributeError(
  form: SourceForm,
  message: string,
): FormField | "form" {
  const urlFields: UrlField[] = ["youtube_url", "github_url", "docs_url"];
  for (const field of urlFields) {
    const value = form[field].trim();
    if (value && message.includes(value)) return field;
  }
  if (/content.?type/i.test(message)) return "github_content_types";
  if (/crawl/i.test(message)) return "docs_crawl_limit";
  return "form";
}

function setActivity(
  activity: Activity[],
  agent: string,
  phase: ActivityPhase,
  failureReason: string | null,
): Activity[] {
  const next = activity.filter((entry) => entry.agent !== agent);
  next.push({ agent, phase, failure_reason: failureReason });
  return next;
}

function applyStreamEvent(state: UiState, event: StreamEvent): UiState {
  switch (event.event) {
    case "routing": {
      const targets: string[] = event.data.targets ?? [];
      return {
        ...state,
        activity: targets.map((agent) => ({
          agent,
          phase: "running" as const,
          failure_reason: null,
        })),
      };
    }
    case "agent_started": {
      const agent = event.data.agent;
      const known = state.activity.some((entry) => entry.agent === agent);
      if (known) return state;
      return { ...state, activity: setActivity(state.activity, agent, "running", null) };
    }
    case "agent_finished": {
      const phase: ActivityPhase = event.data.status === "ok" ? "ok" : "failed";
      return {
        ...state,
        activity: setActivity(
          state.activity,
          event.data.agent,
          phase,
          event.data.failure_reason ?? null,
        ),
      };
    }
    case "delta":
      return { ...state, draft: (state.draft ?? "") + event.data.text };
    case "done":
      return {
        ...state,
        inFlight: false,
        draft: null,
        messages: [
          ...state.messages,
          {
            role: "assistant",
            text: event.data.answer_text,
            citations: event.data.citations ?? [],
            degraded: Boolean(event.data.degraded),
          },
        ],
      };
    case "error":
      return {
        ...state,
        inFlight: false,
        draft: null,
        messages: [
          ...state.messages,
          {
            role: "error",
            code: event.data.code,
            message: event.data.message,
            retryText: lastUserText(state),
          },
        ],
      };
    default:
      return state;
  }
}

function lastUserText(state: UiState): string {
  for (let i = state.messages.length - 1; i >= 0; i--) {
    const message = state.messages[i];
    if (message.role === "user") return message.text;
  }
  return "";
}

export function reduce(state: UiState, event: UiEvent): UiState {
  switch (event.type) {
    case "session_created":
      return { ...state, sessionId: event.id };
    case "form_changed": {
      const fieldErrors = { ...state.fieldErrors };
      delete fieldErrors[event.field];
      delete fieldErrors.form;
      return {
        ...state,
        form: { ...state.form, [event.field]: event.value },
        fieldErrors,
      };
    }
    case "save_started":
      return { ...state, ingestRunning: true, fieldErrors: {} };
    case "save_rejected":
      return {
        ...state,
        ingestRunning: false,
        fieldErrors: { [attributeError(state.form, event.message)]: event.message },
      };
    case "saved":
      return { ...state, form: formFromConfig(event.config) };
    case "ingest_update": {
      const job = event.job;
      const terminal = job.state === "done" || job.state === "partial" || job.state === "failed";
      return {
        ...state,
        badge: job.state,
        ingestRunning: !terminal,
        ingestErrors: job.report?.errors ?? [],
      };
    }
    case "ingest_failed":
      return {
        ...state,
        ingestRunning: false,
        badge: "failed",
        fieldErrors: { ...state.fieldErrors, form: event.message },
      };
    case "send": {
      if (!canSend(state)) return state;
      return {
        ...state,
        inFlight: true,
        draft: "",
        activity: [],
        messages: [...state.messages, { role: "user", text: event.text }],
      };
    }
    case "stream":
      return applyStreamEvent(state, event.event);
    case "stream_failed":
      return {
        ...state,
        inFlight: false,
        draft: null,
        messages: [
          ...state.messages,
          {
            role: "error",
            code: event.code,
            message: event.message,
            retryText: lastUserText(state),
          },
        ],
      };
  }
}
