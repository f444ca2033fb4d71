/**
 * Binary embedding format shared with the engine.
 *
 * Layout: "EMB1" magic, u32 LE dimension, then one record per vector as
 * [u16 LE id length, doc_id utf-8, u32 LE position, dim little-endian f32].
 */

export const MAGIC = Buffer.from("EMB1", "ascii");

export interface EmbeddingRecord {
  docId: string;
  position: number;
  vector: readonly number[];
}

export function encodeHeader(dim: number): Buffer {
  if (!Number.isInteger(dim) || dim < 1) {
    throw new Error(`dimension must be a positive integer, got ${dim}`);
  }
  const header = Buffer.alloc(8);
  MAGIC.copy(header, 0);
  header.writeUInt32LE(dim, 4);
  return header;
}

export function encodeRecord(record: EmbeddingRecord, dim: number): Buffer {
  const idBytes = Buffer.from(record.docId, "utf-8");
  if (idBytes.length > 0xffff) {
    throw new Error(`doc_id '${record.docId.slice(0, 32)}...' exceeds 65535 bytes`);
  }
  if (!Number.isInteger(record.position) || record.position < 0) {
    throw new Error(`(${record.docId},${record.position}): bad position`);
  }
  if (record.vector.length !== dim) {
    throw new Error(
      `(${record.docId},${record.position}) has ${record.vector.length} ` +
        `components, expected ${dim}`,
    );
  }
  if (!record.vector.every(Number.isFinite)) {
    throw new Error(`embedding (${record.docId},${record.position}) is not finite`);
  }
  const buf = Buffer.alloc(2 + idBytes.length + 4 + 4 * dim);
  let offset = buf.writeUInt16LE(idBytes.length, 0);
  offset += idBytes.copy(buf, offset);
  offset = buf.writeUInt32LE(record.position, offset);
  for (const component of record.vector) {
    offset = buf.writeFloatLE(component, offset);
  }
  return buf;
}

/** Parse a whole embedding file; used by the tests to check the writer. */
export function decodeFile(data: Buffer): { dim: number; records: EmbeddingRecord[] } {
  if (data.length < 8 || !data.subarray(0, 4).equals(MAGIC)) {
    throw new Error("bad magic");
  }
  const dim = data.readUInt32LE(4);
  if (dim < 1) {
    throw new Error(`dimension must be positive, got ${dim}`);
  }
  const records: EmbeddingRecord[] = [];
  let offset = 8;
  while (offset < data.length) {
    if (offset + 2 > data.length) {
      throw new Error(`truncated record header at byte ${offset}`);
    }
    const idLen = data.readUInt16LE(offset);
    offset += 2;
    if (offset + idLen + 4 + 4 * dim > data.length) {
      throw new Error(`truncated record at byte ${offset}`);
    }
    const docId = data.subarray(offset, offset + idLen).toString("utf-8");
    offset += idLen;
    const position = data.readUInt32LE(offset);
    offset += 4;
    const vector: number[] = [];
    for (let i = 0; i < dim; i++) {
      vector.push(data.readFloatLE(offset + 4 * i));
    }
    offset += 4 * dim;
    records.push({ docId, position, vector });
  }
  return { dim, records };
}
