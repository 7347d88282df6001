/**
 * Pure state -> HTML-string renderers. Keeping these free of DOM calls
 * lets the tests assert on exactly what the browser would show; app.ts
 * just assigns the strings to innerHTML.
 */

import { citationUrl } from "./links.js";
import type { UiState } from "./state.js";
import type { Citation } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderBadge(state: UiState): string {
  const tooltip = state.ingestErrors
    .map((error) => `${error.source_url}: ${error.message}`)
    .join("\n");
  const title = tooltip ? ` title="${escapeHtml(tooltip)}"` : "";
  return `<span class="badge badge-${state.badge}"${title}>${state.badge}</span>`;
}

export function renderActivity(state: UiState): string {
  return state.activity
    .map((entry) => {
      const reason = entry.failure_reason
        ? ` title="${escapeHtml(entry.failure_reason)}"`
        : "";
      return (
        `<span class="indicator indicator-${entry.phase}"` +
        ` data-agent="${escapeHtml(entry.agent)}"${reason}>` +
        `${escapeHtml(entry.agent)}</span>`
      );
    })
    .join("");
}

export function renderChip(citation: Citation): string {
  return (
    `<a class="chip" href="${escapeHtml(citationUrl(citation))}"` +
    ` target="_blank" rel="noreferrer"` +
    ` title="${escapeHtml(citation.excerpt)}">${escapeHtml(citation.ref)}</a>`
  );
}

export function renderMessages(state: UiState): string {
  const parts: string[] = [];
  for (const message of state.messages) {
    if (message.role === "user") {
      parts.push(`<div class="message user">${escapeHtml(message.text)}</div>`);
    } else if (message.role === "assistant") {
      const chips = message.citations.map(renderChip).join("");
      const degraded = message.degraded
        ? `<div class="degraded-note">partial answer — some agents failed</div>`
        : "";
      parts.push(
        `<div class="message assistant">` +
          `<div class="answer-text">${escapeHtml(message.text)}</div>` +
          (chips ? `<div class="chips">${chips}</div>` : "") +
          degraded +
          `</div>`,
      );
    } else {
      parts.push(
        `<div class="message error">` +
          `<span class="error-code">${escapeHtml(message.code)}</span> ` +
          `${escapeHtml(message.message)} ` +
          `<button class="retry" data-action="retry">retry</button>` +
          `</div>`,
      );
    }
  }
  if (state.draft !== null) {
    parts.push(
      `<div class="message assistant streaming">` +
        `<div class="answer-text">${escapeHtml(state.draft)}</div>` +
        `</div>`,
    );
  }
  return parts.join("");
}

export function renderFieldError(state: UiState, field: string): string {
  const message = state.fieldErrors[field as keyof UiState["fieldErrors"]];
  return message ? `<span class="field-error">${escapeHtml(message)}</span>` : "";
}
