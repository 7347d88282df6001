/**
 * Wire types for the service API, mirroring its JSON schemas. Only the
 * fields the UI consumes are typed strictly; unknown extra fields are
 * tolerated everywhere.
 */

export type SourceKind = "video" | "code" | "documentation" | "web";

export interface VideoLocator {
  type: "video";
  start_seconds: number;
  end_seconds: number;
}

export interface CodeLocator {
  type: "code";
  file_path: string;
  start_line: number;
  end_line: number;
  artifact_class: "code" | "issue" | "pull_request";
}

export interface DocLocator {
  type: "documentation";
  page_url: string;
  heading_path: string[];
}

export interface WebLocator {
  type: "web";
  page_url: string;
}

export type Locator = VideoLocator | CodeLocator | DocLocator | WebLocator;

export interface Citation {
  kind: SourceKind;
  source_url: string;
  locator: Locator;
  excerpt: string;
  chunk_id: string;
  ref: string;
}

export interface AgentReport {
  agent: string;
  status: "ok" | "failed";
  elapsed_ms: number;
  failure_reason: string | null;
}

export interface ChatResponse {
  answer_text: string;
  citations: Citation[];
  agent_reports: AgentReport[];
  degraded: boolean;
}

export interface SourceConfigPayload {
  youtube_url: string | null;
  github_url: string | null;
  github_content_types: string[];
  docs_url: string | null;
  docs_crawl_limit: number;
}

export interface HistoryEntry {
  user_text: string;
  response: ChatResponse;
}

export interface SessionPayload {
  id: string;
  source_config: SourceConfigPayload;
  ingest_state: "empty" | "running" | "ready" | "partial";
  history: HistoryEntry[];
  created_at: string;
}

export interface IngestErrorPayload {
  source_url: string;
  error_code: string;
  message: string;
}

export interface IngestReportPayload {
  status: "ready" | "partial" | "failed";
  documents_fetched: number;
  chunks_indexed: number;
  errors: IngestErrorPayload[];
}

export type JobState = "queued" | "running" | "done" | "partial" | "failed";

export interface IngestJobPayload {
  job_id: string;
  session_id: string;
  state: JobState;
  report: IngestReportPayload | null;
}

/** One server-sent event, with its data already JSON-decoded. */
export interface StreamEvent {
  event: string;
  data: any;
}
