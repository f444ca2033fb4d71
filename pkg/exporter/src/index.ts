export { readCorpus } from "./corpus.js";
export type { CorpusDocument, CorpusSentence } from "./corpus.js";
export { exportEmbeddings } from "./exporter.js";
export type { ExportManifest, ExportOptions } from "./exporter.js";
export { decodeFile, encodeHeader, encodeRecord, MAGIC } from "./format.js";
export type { EmbeddingRecord } from "./format.js";
export { resolveModel } from "./models.js";
export type { EmbeddingModel } from "./models.js";
export { splitSentences, tokenize } from "./text.js";
