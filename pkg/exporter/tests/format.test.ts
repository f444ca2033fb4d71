import { describe, expect, it } from "vitest";

import { decodeFile, encodeHeader, encodeRecord, MAGIC } from "../src/format.js";

describe("encodeHeader", () => {
  it("writes the magic and a little-endian u32 dimension", () => {
    const header = encodeHeader(384);
    expect(header.subarray(0, 4)).toEqual(MAGIC);
    // 384 = 0x180 little-endian
    expect([...header.subarray(4)]).toEqual([0x80, 0x01, 0x00, 0x00]);
  });

  it("rejects non-positive or fractional dimensions", () => {
    expect(() => encodeHeader(0)).toThrow(/positive/);
    expect(() => encodeHeader(2.5)).toThrow(/positive/);
  });
});

describe("encodeRecord", () => {
  it("lays out id length, id bytes, position, f32 components", () => {
    const buf = encodeRecord({ docId: "ab", position: 7, vector: [1.5, -2.0] }, 2);
    expect([...buf]).toEqual([
      0x02, 0x00, // id length 2
      0x61, 0x62, // "ab"
      0x07, 0x00, 0x00, 0x00, // position 7
      0x00, 0x00, 0xc0, 0x3f, // 1.5f
      0x00, 0x00, 0x00, 0xc0, // -2.0f
    ]);
  });

  it("measures the id in utf-8 bytes, not characters", () => {
    const buf = encodeRecord({ docId: "é", position: 0, vector: [0] }, 1);
    expect(buf.readUInt16LE(0)).toBe(2);
  });

  it("rejects dimension mismatches, bad positions, non-finite values", () => {
    expect(() => encodeRecord({ docId: "a", position: 0, vector: [1] }, 2)).toThrow(
      /1 components, expected 2/,
    );
    expect(() => encodeRecord({ docId: "a", position: -1, vector: [1] }, 1)).toThrow(
      /bad position/,
    );
    expect(() => encodeRecord({ docId: "a", position: 0, vector: [NaN] }, 1)).toThrow(
      /not finite/,
    );
    expect(() =>
      encodeRecord({ docId: "a", position: 0, vector: [Infinity] }, 1),
    ).toThrow(/not finite/);
  });
});

describe("decodeFile", () => {
  it("roundtrips header plus records through f32 precision", () => {
    const records = [
      { docId: "doc-a", position: 0, vector: [0.25, -1.0, 3.0] },
      { docId: "doc-b", position: 4, vector: [1e-3, 2.5, -0.125] },
    ];
    const parts = [encodeHeader(3), ...records.map((r) => encodeRecord(r, 3))];
    const parsed = decodeFile(Buffer.concat(parts));
    expect(parsed.dim).toBe(3);
    expect(parsed.records).toHaveLength(2);
    expect(parsed.records[0]!.docId).toBe("doc-a");
    expect(parsed.records[1]!.position).toBe(4);
    expect(parsed.records[0]!.vector).toEqual([0.25, -1.0, 3.0]);
    expect(parsed.records[1]!.vector[1]).toBe(2.5);
    expect(parsed.records[1]!.vector[0]).toBeCloseTo(1e-3, 9);
  });

  it("rejects bad magic and truncated records", () => {
    expect(() => decodeFile(Buffer.from("NOPE\x02\x00\x00\x00"))).toThrow(/magic/);
    const whole = Buffer.concat([
      encodeHeader(2),
      encodeRecord({ docId: "a", position: 0, vector: [1, 2] }, 2),
    ]);
    expect(() => decodeFile(whole.subarray(0, whole.length - 3))).toThrow(/truncated/);
    expect(() => decodeFile(whole.subarray(0, 9))).toThrow(/truncated/);
  });

  it("rejects a zero dimension", () => {
    const bad = Buffer.concat([MAGIC, Buffer.from([0, 0, 0, 0])]);
    expect(() => decodeFile(bad)).toThrow(/dimension/);
  });
});
