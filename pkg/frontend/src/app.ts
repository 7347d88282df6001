/**
 * Browser entry point: bind the form and chat pane to a UiController and
 * re-render on every state change. All markup comes from render.ts; this
 * file only finds elements and wires events.
 */

import { ApiClient } from "./api.js";
import { UiController } from "./controller.js";
import {
  renderActivity,
  renderBadge,
  renderFieldError,
  renderMessages,
} from "./render.js";
import { canSend, type SourceForm } from "./state.js";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function readForm(): SourceForm {
  const types: string[] = [];
  for (const name of ["code", "issue", "pull_request"]) {
    if (element<HTMLInputElement>(`type-${name}`).checked) types.push(name);
  }
  const crawlRaw = element<HTMLInputElement>("docs-crawl-limit").value.trim();
  const crawl = crawlRaw ? Number(crawlRaw) : null;
  return {
    youtube_url: element<HTMLInputElement>("youtube-url").value,
    github_url: element<HTMLInputElement>("github-url").value,
    docs_url: element<HTMLInputElement>("docs-url").value,
    github_content_types: types,
    docs_crawl_limit: Number.isFinite(crawl as number) ? crawl : null,
  };
}

function main(): void {
  const api = new ApiClient(window.location.origin);
  const controller = new UiController(api);

  const badge = element("ingest-badge");
  const activity = element("agent-activity");
  const messages = element("messages");
  const input = element<HTMLInputElement>("chat-input");
  const sendButton = element<HTMLButtonElement>("send-button");
  const saveButton = element<HTMLButtonElement>("save-button");

  controller.subscribe((state) => {
    badge.innerHTML = renderBadge(state);
    activity.innerHTML = renderActivity(state);
    messages.innerHTML = renderMessages(state);
    for (const field of ["youtube_url", "github_url", "docs_url", "form"]) {
      const slot = document.getElementById(`error-${field}`);
      if (slot) slot.innerHTML = renderFieldError(state, field);
    }
    const sendable = canSend(state);
    input.disabled = !sendable;
    sendButton.disabled = !sendable;
    saveButton.disabled = state.ingestRunning || state.inFlight;
    messages.scrollTop = messages.scrollHeight;
  });

  saveButton.addEventListener("click", () => {
    void controller.configureSources(readForm());
  });

  const submit = () => {
    const text = input.value;
    input.value = "";
    void controller.send(text);
  };
  sendButton.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      submit();
    }
  });

  messages.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "retry") void controller.retryLastError();
  });

  void controller.init();
}

main();
