import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { readCorpus } from "../src/corpus.js";

function corpusFile(lines: string[]): string {
  const dir = mkdtempSync(join(tmpdir(), "corpus-"));
  const path = join(dir, "corpus.jsonl");
  writeFileSync(path, lines.join("\n") + "\n");
  return path;
}

function doc(fields: Record<string, unknown>): string {
  return JSON.stringify({
    doc_id: "d1",
    set_id: "s",
    timestamp: "2021-01-01T00:00:00Z",
    ...fields,
  });
}

describe("readCorpus", () => {
  it("strips pre-split sentences and drops empties, keeping positions dense", () => {
    const docs = readCorpus(
      corpusFile([doc({ sentences: ["  One here.  ", "", "Two here.", " "] })]),
    );
    expect(docs).toHaveLength(1);
    expect(docs[0]!.sentences).toEqual([
      { text: "One here.", position: 0 },
      { text: "Two here.", position: 1 },
    ]);
  });

  it("splits raw text when no pre-split sentences exist", () => {
    const docs = readCorpus(corpusFile([doc({ text: "First done. Second begins." })]));
    expect(docs[0]!.sentences.map((s) => s.text)).toEqual([
      "First done.",
      "Second begins.",
    ]);
  });

  it("prefers pre-split sentences over raw text", () => {
    const docs = readCorpus(
      corpusFile([doc({ sentences: ["Only this."], text: "Not this. Nor this." })]),
    );
    expect(docs[0]!.sentences.map((s) => s.text)).toEqual(["Only this."]);
  });

  it("coerces ids to strings and skips blank lines", () => {
    const docs = readCorpus(
      corpusFile([
        "",
        doc({ doc_id: 42, text: "Numbers work." }),
        "   ",
        doc({ doc_id: "d2", text: "Ok." }),
      ]),
    );
    expect(docs.map((d) => d.docId)).toEqual(["42", "d2"]);
  });

  it("reports parse and contract violations with line numbers", () => {
    expect(() => readCorpus(corpusFile(["{oops"]))).toThrow(/line 1: invalid JSON/);
    expect(() => readCorpus(corpusFile(['["not an object"]']))).toThrow(
      /line 1: record is not an object/,
    );
    expect(() => readCorpus(corpusFile([doc({ text: "Ok." }), doc({ text: "Ok." })]))).toThrow(
      /line 2: duplicate doc_id 'd1'/,
    );
    const missing = JSON.stringify({ doc_id: "d1", set_id: "s", text: "Ok." });
    expect(() => readCorpus(corpusFile([missing]))).toThrow(
      /missing required field 'timestamp'/,
    );
    expect(() => readCorpus(corpusFile([doc({})]))).toThrow(
      /neither 'text' nor 'sentences'/,
    );
    expect(() => readCorpus(corpusFile([doc({ sentences: ["", "  "] })]))).toThrow(
      /has no sentences/,
    );
    expect(() => readCorpus(corpusFile([doc({ sentences: [3] })]))).toThrow(
      /array of strings/,
    );
    expect(() => readCorpus(corpusFile([doc({ text: 3 })]))).toThrow(/must be a string/);
  });
});
