// Split a body into runs so highlight marks can wrap exact server spans.

import type { HighlightPayload } from "./types.js";

export interface Segment {
  start: number;
  text: string;
  /** Highlights covering this run, in ascending id order. */
  covering: HighlightPayload[];
}

/**
 * Cut `body` at every highlight boundary. Same-color spans never overlap
 * (the server merges them), but different colors may; a run then carries
 * all of its covering highlights.
 */
export function segmentBody(
  body: string,
  highlights: HighlightPayload[],
  target: string,
): Segment[] {
  const spans = highlights
    .filter((h) => h.target === target)
    .slice()
    .sort((a, b) => a.char_start - b.char_start || a.id.localeCompare(b.id));

  const cuts = new Set<number>([0, body.length]);
  for (const span of spans) {
    cuts.add(span.char_start);
    cuts.add(span.char_end);
  }
  const points = [...cuts].sort((a, b) => a - b);

  const out: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const start = points[i];
    const end = points[i + 1];
    if (start >= end) continue;
    out.push({
      start,
      text: body.slice(start, end),
      covering: spans.filter((s) => s.char_start <= start && end <= s.char_end),
    });
  }
  return out;
}
