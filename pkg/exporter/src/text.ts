/**
 * Text primitives mirrored from the summarizer engine. Position keys in the
 * embedding file come from sentence enumeration, so the splitting rule here
 * must match the engine's exactly or every lookup silently misaligns.
 */

// A sentence boundary is sentence-final punctuation followed by whitespace
// and an uppercase letter (or end of text).
const BOUNDARY = /(?<=[.?!])\s+(?=[A-Z])/;

const TOKEN = /[a-z0-9]+/g;

export function splitSentences(text: string): string[] {
  return text
    .split(BOUNDARY)
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

/** Lowercase, split on non-alphanumeric runs, drop tokens shorter than 2. */
export function tokenize(text: string): string[] {
  const matches = text.toLowerCase().match(TOKEN) ?? [];
  return matches.filter((t) => t.length >= 2);
}
