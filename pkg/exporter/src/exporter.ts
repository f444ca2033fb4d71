/**
 * Batch export: read a corpus, embed every sentence, stream the binary
 * embedding file, and write a manifest JSON beside it. Any failure after the
 * output file is opened removes the partial file before rethrowing.
 */

import { closeSync, openSync, rmSync, writeFileSync, writeSync } from "node:fs";

import { readCorpus } from "./corpus.js";
import { encodeHeader, encodeRecord } from "./format.js";
import { EmbeddingModel, resolveModel } from "./models.js";

export interface ExportManifest {
  corpus: string;
  model: string;
  out: string;
  dim: number;
  count: number;
}

export interface ExportOptions {
  batchSize?: number;
}

interface PendingRecord {
  docId: string;
  position: number;
  text: string;
}

export async function exportEmbeddings(
  corpusPath: string,
  model: string | EmbeddingModel,
  outPath: string,
  options: ExportOptions = {},
): Promise<ExportManifest> {
  const batchSize = options.batchSize ?? 64;
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${batchSize}`);
  }
  const docs = readCorpus(corpusPath);
  if (docs.length === 0) {
    throw new Error(`corpus ${corpusPath} has no documents`);
  }
  const pending: PendingRecord[] = [];
  for (const doc of docs) {
    for (const sentence of doc.sentences) {
      pending.push({ docId: doc.docId, position: sentence.position, text: sentence.text });
    }
  }
  // same record order as the engine's writer
  pending.sort((a, b) =>
    a.docId < b.docId ? -1 : a.docId > b.docId ? 1 : a.position - b.position,
  );
  const resolved = typeof model === "string" ? await resolveModel(model) : model;

  const fd = openSync(outPath, "w");
  let open = true;
  let dim = 0;
  try {
    for (let start = 0; start < pending.length; start += batchSize) {
      const batch = pending.slice(start, start + batchSize);
      const vectors = await resolved.embed(batch.map((record) => record.text));
      if (vectors.length !== batch.length) {
        throw new Error(
          `model '${resolved.id}' returned ${vectors.length} vectors ` +
            `for a batch of ${batch.length}`,
        );
      }
      if (dim === 0) {
        dim = vectors[0]?.length ?? 0;
        writeSync(fd, encodeHeader(dim));
      }
      for (let i = 0; i < batch.length; i++) {
        const record = batch[i]!;
        writeSync(
          fd,
          encodeRecord(
            { docId: record.docId, position: record.position, vector: vectors[i]! },
            dim,
          ),
        );
      }
    }
    open = false;
    closeSync(fd);
    const manifest: ExportManifest = {
      corpus: corpusPath,
      model: resolved.id,
      out: outPath,
      dim,
      count: pending.length,
    };
    writeFileSync(`${outPath}.manifest.json`, JSON.stringify(manifest, null, 2) + "\n");
    return manifest;
  } catch (err) {
    if (open) {
      closeSync(fd);
    }
    rmSync(outPath, { force: true });
    rmSync(`${outPath}.manifest.json`, { force: true });
    throw err;
  }
}
