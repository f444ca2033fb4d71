/**
 * Reader for the engine's corpus JSONL: one document per line carrying
 * doc_id, set_id, timestamp, and either pre-split "sentences" or raw "text".
 * Only the parts that determine (doc_id, position) keys are validated here;
 * full temporal validation belongs to the engine.
 */

import { readFileSync } from "node:fs";

import { splitSentences } from "./text.js";

export interface CorpusSentence {
  text: string;
  position: number;
}

export interface CorpusDocument {
  docId: string;
  setId: string;
  sentences: CorpusSentence[];
}

function sentenceTexts(record: Record<string, unknown>, lineNo: number): string[] {
  if ("sentences" in record) {
    const raw = record["sentences"];
    if (!Array.isArray(raw) || raw.some((s) => typeof s !== "string")) {
      throw new Error(`line ${lineNo}: "sentences" must be an array of strings`);
    }
    return raw.map((s: string) => s.trim()).filter((s) => s.length > 0);
  }
  if ("text" in record) {
    if (typeof record["text"] !== "string") {
      throw new Error(`line ${lineNo}: "text" must be a string`);
    }
    return splitSentences(record["text"]);
  }
  throw new Error(`line ${lineNo}: record has neither 'text' nor 'sentences'`);
}

export function readCorpus(path: string): CorpusDocument[] {
  const body = readFileSync(path, "utf-8");
  const docs: CorpusDocument[] = [];
  const seen = new Set<string>();
  const lines = body.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (!line) {
      continue;
    }
    const lineNo = i + 1;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch (err) {
      throw new Error(`line ${lineNo}: invalid JSON: ${(err as Error).message}`);
    }
    if (typeof record !== "object" || record === null || Array.isArray(record)) {
      throw new Error(`line ${lineNo}: record is not an object`);
    }
    const rec = record as Record<string, unknown>;
    for (const key of ["doc_id", "set_id", "timestamp"]) {
      if (!(key in rec)) {
        throw new Error(`line ${lineNo}: missing required field '${key}'`);
      }
    }
    const docId = String(rec["doc_id"]);
    const texts = sentenceTexts(rec, lineNo);
    if (texts.length === 0) {
      throw new Error(`line ${lineNo}: document '${docId}' has no sentences`);
    }
    if (seen.has(docId)) {
      throw new Error(`line ${lineNo}: duplicate doc_id '${docId}'`);
    }
    seen.add(docId);
    docs.push({
      docId,
      setId: String(rec["set_id"]),
      sentences: texts.map((text, position) => ({ text, position })),
    });
  }
  return docs;
}
