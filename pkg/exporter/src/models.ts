/**
 * Embedding model registry.
 *
 * `hash-<dim>` is built in and needs no downloads: each token maps to a
 * direction seeded from its sha256 digest, and a sentence is the normalized
 * sum over its token multiset, so shared tokens pull sentences together.
 * Hub model ids (anything containing "/") run through the optional
 * @huggingface/transformers package with mean pooling and normalization.
 */

import { createHash } from "node:crypto";

import { tokenize } from "./text.js";

export interface EmbeddingModel {
  readonly id: string;
  embed(texts: string[]): Promise<number[][]>;
}

const HASH_ID = /^hash-(\d+)$/;

class HashModel implements EmbeddingModel {
  readonly id: string;
  readonly dim: number;
  private readonly directions = new Map<string, Float64Array>();

  constructor(dim: number) {
    if (dim < 8) {
      throw new Error(`hash model dimension must be >= 8, got ${dim}`);
    }
    this.id = `hash-${dim}`;
    this.dim = dim;
  }

  private direction(token: string): Float64Array {
    const cached = this.directions.get(token);
    if (cached !== undefined) {
      return cached;
    }
    const vec = new Float64Array(this.dim);
    let block = Buffer.alloc(0);
    let counter = 0;
    let used = 0;
    let norm = 0;
    for (let i = 0; i < this.dim; i++) {
      if (used + 4 > block.length) {
        block = createHash("sha256").update(`${token}:${counter++}`).digest();
        used = 0;
      }
      // uniform in [-1, 1) from 4 digest bytes
      vec[i] = (block.readUInt32LE(used) / 0x100000000) * 2 - 1;
      used += 4;
      norm += vec[i]! * vec[i]!;
    }
    norm = Math.sqrt(norm);
    for (let i = 0; i < this.dim; i++) {
      vec[i] = vec[i]! / norm;
    }
    this.directions.set(token, vec);
    return vec;
  }

  private embedOne(text: string): number[] {
    let tokens = tokenize(text);
    if (tokens.length === 0) {
      tokens = [""];
    }
    const total = new Float64Array(this.dim);
    for (const token of tokens) {
      const dir = this.direction(token);
      for (let i = 0; i < this.dim; i++) {
        total[i] = total[i]! + dir[i]!;
      }
    }
    let norm = 0;
    for (let i = 0; i < this.dim; i++) {
      norm += total[i]! * total[i]!;
    }
    norm = Math.sqrt(norm);
    if (norm < 1e-12) {
      throw new Error("token directions cancelled to the zero vector");
    }
    return Array.from(total, (component) => component / norm);
  }

  embed(texts: string[]): Promise<number[][]> {
    return Promise.resolve(texts.map((text) => this.embedOne(text)));
  }
}

async function loadHubModel(id: string): Promise<EmbeddingModel> {
  const packageName = "@huggingface/transformers";
  let pipelineFactory: (task: string, model: string) => Promise<unknown>;
  try {
    const mod = await import(packageName);
    pipelineFactory = mod.pipeline;
  } catch {
    throw new Error(
      `model '${id}' needs the optional ${packageName} package ` +
        `(npm install ${packageName})`,
    );
  }
  const pipe = (await pipelineFactory("feature-extraction", id)) as (
    texts: string[],
    options: { pooling: string; normalize: boolean },
  ) => Promise<{ dims: number[]; data: Iterable<number> }>;
  return {
    id,
    async embed(texts: string[]): Promise<number[][]> {
      const output = await pipe(texts, { pooling: "mean", normalize: true });
      const dim = output.dims[output.dims.length - 1];
      if (dim === undefined || dim < 1) {
        throw new Error(`model '${id}' reported no embedding dimension`);
      }
      const flat = Array.from(output.data);
      const rows: number[][] = [];
      for (let i = 0; i < texts.length; i++) {
        rows.push(flat.slice(i * dim, (i + 1) * dim));
      }
      return rows;
    },
  };
}

export async function resolveModel(id: string): Promise<EmbeddingModel> {
  const hashMatch = HASH_ID.exec(id);
  if (hashMatch !== null) {
    return new HashModel(Number(hashMatch[1]));
  }
  if (id.includes("/")) {
    return loadHubModel(id);
  }
  throw new Error(`unknown model '${id}' (use hash-<dim> or a hub id like org/name)`);
}
