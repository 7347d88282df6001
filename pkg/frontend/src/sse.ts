/**
 * Incremental server-sent-events parser. The server frames each event as
 *
 *     event: <name>\n
 *     data: <one JSON object>\n
 *     \n
 *
 * but the network is free to cut that anywhere, so the parser buffers
 * until it holds a complete blank-line-terminated block. Multi-line data
 * and CRLF endings are handled per the SSE spec; comment lines and
 * unknown fields are ignored.
 */

import type { StreamEvent } from "./types.js";

function parseBlock(block: string): StreamEvent | null {
  let name = "message";
  const data: string[] = [];
  for (const raw of block.split("\n")) {
    const line = raw.endsWith("\r") ? raw.slice(0, -1) : raw;
    if (line.startsWith(":")) continue;
    if (line.startsWith("event:")) {
      name = line.slice("event:".length).trim();
    } else if (line.startsWith("data:")) {
      data.push(line.slice("data:".length).replace(/^ /, ""));
    }
  }
  if (data.length === 0) return null;
  return { event: name, data: JSON.parse(data.join("\n")) };
}

/** Pull every complete event off the front of `buffer`; return the rest. */
export function drainBuffer(buffer: string): { events: StreamEvent[]; rest: string } {
  const events: StreamEvent[] = [];
  let rest = buffer;
  for (;;) {
    const normalized = rest.replace(/\r\n/g, "\n");
    const cut = normalized.indexOf("\n\n");
    if (cut < 0) break;
    const block = normalized.slice(0, cut);
    rest = normalized.slice(cut + 2);
    const event = parseBlock(block);
    if (event) events.push(event);
  }
  return { events, rest };
}

/** Adapt a web ReadableStream to an async iterable of byte chunks —
 * `for await` over ReadableStream itself is still missing in some
 * browsers. */
export async function* byteChunks(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<Uint8Array> {
  const reader = body.getReader();
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) return;
      if (value) yield value;
    }
  } finally {
    reader.releaseLock();
  }
}

export async function* sseEvents(
  chunks: AsyncIterable<Uint8Array>,
): AsyncGenerator<StreamEvent> {
  const decoder = new TextDecoder();
  let buffer = "";
  for await (const chunk of chunks) {
    buffer += decoder.decode(chunk, { stream: true });
    const { events, rest } = drainBuffer(buffer);
    buffer = rest;
    yield* events;
  }
  buffer += decoder.decode();
  if (buffer.trim()) {
    // a final block the server forgot to terminate
    const { events } = drainBuffer(buffer + "\n\n");
    yield* events;
  }
}
