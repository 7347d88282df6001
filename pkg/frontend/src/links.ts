/**
 * Citation deep links: every citation chip points back into the original
 * resource as precisely as its locator allows.
 *
 *   video          -> source URL with a start-time parameter
 *   code           -> file view with a line-range fragment
 *   issue / PR     -> the thread's own page under the repository
 *   documentation  -> page URL, plus a heading fragment when one is known
 *   web            -> page URL as-is
 *
 * Anything unrecognized falls back to the bare source URL.
 */

import type { Citation } from "./types.js";

function withTimeParam(url: string, seconds: number): string {
  const separator = url.includes("?") ? "&" : "?";
  return `${url}${separator}t=${Math.max(0, Math.floor(seconds))}`;
}

function trimSlash(url: string): string {
  return url.endsWith("/") ? url.slice(0, -1) : url;
}

/** Lowercase, alphanumeric runs joined by single hyphens — the common
 * anchor-id convention for headings. */
export function headingSlug(heading: string): string {
  return heading
    .toLowerCase()
    .replace(/[^a-z0-9]+/g, "-")
    .replace(/^-+|-+$/g, "");
}

export function citationUrl(citation: Citation): string {
  const locator = citation.locator;
  switch (locator?.type) {
    case "video":
      return withTimeParam(citation.source_url, locator.start_seconds);
    case "code": {
      const base = trimSlash(citation.source_url);
      if (locator.artifact_class === "issue" || locator.artifact_class === "pull_request") {
        return `${base}/${locator.file_path}`;
      }
      return `${base}/blob/HEAD/${locator.file_path}#L${locator.start_line}-L${locator.end_line}`;
    }
    case "documentation": {
      const headings = locator.heading_path;
      if (headings && headings.length > 0) {
        const slug = headingSlug(headings[headings.length - 1]);
        if (slug) return `${locator.page_url}#${slug}`;
      }
      return locator.page_url;
    }
    case "web":
      return locator.page_url;
    default:
      return citation.source_url;
  }
}
