import { describe, expect, it } from "vitest";
import {
  bankRawPath,
  decodeEmbs,
  encodeBank,
  encodeEmbs,
  EmbsStream,
  FLAG_TRUTHS,
  HEADER_BYTES,
} from "../src/embs.js";
import { seededRng } from "../src/rng.js";

function unitVec(dim: number, key: string): Float64Array {
  const rng = seededRng(key);
  const v = new Float64Array(dim);
  let norm = 0;
  for (let d = 0; d < dim; d++) {
    v[d] = rng.normal();
    norm += v[d] * v[d];
  }
  norm = Math.sqrt(norm);
  for (let d = 0; d < dim; d++) v[d] /= norm;
  return v;
}

function sampleStream(): EmbsStream {
  return {
    dim: 6,
    numClasses: 3,
    records: [
      { truth: 0, original: unitVec(6, "r0"), views: [unitVec(6, "r0v0"), unitVec(6, "r0v1")] },
      { truth: -1, original: unitVec(6, "r1"), views: [] },
      { truth: 2, original: unitVec(6, "r2"), views: [unitVec(6, "r2v0")] },
    ],
  };
}

describe("encodeEmbs", () => {
  it("lays out the 28-byte header", () => {
    const buf = encodeEmbs(sampleStream());
    expect(buf.toString("ascii", 0, 4)).toBe("EMBS");
    expect(buf.readUInt32LE(4)).toBe(1); // version
    expect(buf.readUInt32LE(8)).toBe(6); // dim
    expect(buf.readUInt32LE(12)).toBe(3); // classes
    expect(Number(buf.readBigUInt64LE(16))).toBe(3); // records
    expect(buf.readUInt32LE(24)).toBe(FLAG_TRUTHS);
  });

  it("sizes records as 6 header bytes plus (1+V)*dim f32", () => {
    const buf = encodeEmbs(sampleStream());
    const payload = (4 + 2 + 3 * 6 * 4) + (4 + 2 + 1 * 6 * 4) + (4 + 2 + 2 * 6 * 4);
    expect(buf.length).toBe(HEADER_BYTES + payload);
  });

  it("clears the truth flag when no record is labeled", () => {
    const stream = sampleStream();
    for (const rec of stream.records) rec.truth = -1;
    expect(encodeEmbs(stream).readUInt32LE(24)).toBe(0);
  });

  it("rejects out-of-range truths and oversized view counts", () => {
    const bad = sampleStream();
    bad.records[0].truth = 3;
    expect(() => encodeEmbs(bad)).toThrow(/out of range/);
    const wide = sampleStream();
    wide.records[0].views = Array.from({ length: 0x10000 }, () => unitVec(6, "x"));
    expect(() => encodeEmbs(wide)).toThrow(/u16/);
  });

  it("rejects dimension mismatches and non-finite values", () => {
    const short = sampleStream();
    short.records[1].original = unitVec(5, "short");
    expect(() => encodeEmbs(short)).toThrow(/dims/);
    const nan = sampleStream();
    nan.records[0].views[0][2] = Number.NaN;
    expect(() => encodeEmbs(nan)).toThrow(/non-finite/);
  });
});

describe("decodeEmbs", () => {
  it("round-trips truths, view counts, and f32-exact embeddings", () => {
    const stream = sampleStream();
    const back = decodeEmbs(encodeEmbs(stream));
    expect(back.dim).toBe(6);
    expect(back.numClasses).toBe(3);
    expect(back.records.map((r) => r.truth)).toEqual([0, -1, 2]);
    expect(back.records.map((r) => r.views.length)).toEqual([2, 0, 1]);
    for (let r = 0; r < 3; r++) {
      const want = stream.records[r];
      const got = back.records[r];
      for (let d = 0; d < 6; d++) {
        expect(got.original[d]).toBe(Math.fround(want.original[d]));
      }
      for (let v = 0; v < want.views.length; v++) {
        for (let d = 0; d < 6; d++) {
          expect(got.views[v][d]).toBe(Math.fround(want.views[v][d]));
        }
      }
    }
  });

  it("re-encoding a decoded stream is bitwise identical", () => {
    const first = encodeEmbs(sampleStream());
    const second = encodeEmbs({ ...decodeEmbs(first) });
    expect(second.equals(first)).toBe(true);
  });

  it("rejects bad magic, bad version, truncation, trailing bytes", () => {
    const buf = encodeEmbs(sampleStream());
    const magic = Buffer.from(buf);
    magic[0] = "X".charCodeAt(0);
    expect(() => decodeEmbs(magic)).toThrow(/magic/);
    const version = Buffer.from(buf);
    version.writeUInt32LE(2, 4);
    expect(() => decodeEmbs(version)).toThrow(/version/);
    expect(() => decodeEmbs(buf.subarray(0, buf.length - 3))).toThrow(/truncated/);
    expect(() => decodeEmbs(Buffer.concat([buf, Buffer.from([0])]))).toThrow(/trailing/);
    expect(() => decodeEmbs(buf.subarray(0, 10))).toThrow(/header/);
  });
});

describe("encodeBank / bankRawPath", () => {
  it("produces a manifest naming every class and dim, plus N*C*4 raw bytes", () => {
    const rows = [unitVec(6, "b0"), unitVec(6, "b1"), unitVec(6, "b2")];
    const { manifest, raw } = encodeBank({ names: ["a", "b", "c"], rows });
    const parsed = JSON.parse(manifest);
    expect(parsed.names).toEqual(["a", "b", "c"]);
    expect(parsed.C).toBe(6);
    expect(raw.length).toBe(3 * 6 * 4);
    for (let d = 0; d < 6; d++) {
      expect(raw.readFloatLE(d * 4)).toBe(Math.fround(rows[0][d]));
    }
  });

  it("rejects name/row mismatches and single-class banks", () => {
    expect(() =>
      encodeBank({ names: ["a"], rows: [unitVec(4, "x"), unitVec(4, "y")] }),
    ).toThrow(/names/);
    expect(() => encodeBank({ names: ["solo"], rows: [unitVec(4, "z")] })).toThrow(/2 classes/);
  });

  it("replaces only the last extension", () => {
    expect(bankRawPath("/tmp/bank.json")).toBe("/tmp/bank.f32");
    expect(bankRawPath("/tmp/my.bank.json")).toBe("/tmp/my.bank.f32");
    expect(bankRawPath("bank")).toBe("bank.f32");
    expect(bankRawPath("/a.b/bank")).toBe("/a.b/bank.f32");
  });
});
