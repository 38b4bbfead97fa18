/**
 * EMBS binary stream writer/reader and class-bank writer.
 *
 * Layout (little-endian throughout):
 *   header, 28 bytes: magic "EMBS", version u32 (=1), C u32, N u32,
 *                     record_count u64, flags u32 (bit 0 = truths present)
 *   per record: truth i32 (-1 when unlabeled), view_count u16,
 *               then (1 + view_count) * C float32 embeddings
 *               (original first, then each augmented view)
 *
 * The class bank is a JSON manifest {"names": [...], "C": int} plus a
 * sibling raw float32 file holding N x C unit rows; the raw path is the
 * manifest path with its last extension replaced by ".f32".
 */

export const MAGIC = "EMBS";
export const VERSION = 1;
export const HEADER_BYTES = 28;
export const FLAG_TRUTHS = 1;

export interface EmbsRecord {
  truth: number; // -1 when unlabeled
  original: Float64Array;
  views: Float64Array[];
}

export interface EmbsStream {
  dim: number;
  numClasses: number;
  records: EmbsRecord[];
}

function checkVector(vec: Float64Array, dim: number, what: string): void {
  if (vec.length !== dim) {
    throw new Error(`${what} has ${vec.length} dims, expected ${dim}`);
  }
  for (const v of vec) {
    if (!Number.isFinite(v)) throw new Error(`${what} contains a non-finite value`);
  }
}

/** Serialize a stream to the EMBS byte layout. */
export function encodeEmbs(stream: EmbsStream): Buffer {
  const { dim, numClasses, records } = stream;
  if (dim < 1) throw new Error(`dim must be >= 1, got ${dim}`);
  if (numClasses < 2) throw new Error(`numClasses must be >= 2, got ${numClasses}`);
  let anyTruth = false;
  let payload = 0;
  for (const rec of records) {
    if (rec.truth < -1 || rec.truth >= numClasses) {
      throw new Error(`truth ${rec.truth} out of range for ${numClasses} classes`);
    }
    if (rec.views.length > 0xffff) {
      throw new Error(`view count ${rec.views.length} exceeds u16 range`);
    }
    checkVector(rec.original, dim, "original embedding");
    for (const view of rec.views) checkVector(view, dim, "view embedding");
    if (rec.truth >= 0) anyTruth = true;
    payload += 4 + 2 + (1 + rec.views.length) * dim * 4;
  }
  const buf = Buffer.alloc(HEADER_BYTES + payload);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(VERSION, 4);
  buf.writeUInt32LE(dim, 8);
  buf.writeUInt32LE(numClasses, 12);
  buf.writeBigUInt64LE(BigInt(records.length), 16);
  buf.writeUInt32LE(anyTruth ? FLAG_TRUTHS : 0, 24);
  let off = HEADER_BYTES;
  for (const rec of records) {
    buf.writeInt32LE(rec.truth, off);
    off += 4;
    buf.writeUInt16LE(rec.views.length, off);
    off += 2;
    for (const vec of [rec.original, ...rec.views]) {
      for (let d = 0; d < dim; d++) {
        buf.writeFloatLE(vec[d], off);
        off += 4;
      }
    }
  }
  return buf;
}

/** Parse EMBS bytes back into a stream (used by tests to verify exports). */
export function decodeEmbs(buf: Buffer): EmbsStream {
  if (buf.length < HEADER_BYTES) {
    throw new Error(`stream is ${buf.length} bytes, header needs ${HEADER_BYTES}`);
  }
  if (buf.toString("ascii", 0, 4) !== MAGIC) {
    throw new Error(`bad magic ${JSON.stringify(buf.toString("ascii", 0, 4))}`);
  }
  const version = buf.readUInt32LE(4);
  if (version !== VERSION) throw new Error(`unsupported version ${version}`);
  const dim = buf.readUInt32LE(8);
  const numClasses = buf.readUInt32LE(12);
  const count = Number(buf.readBigUInt64LE(16));
  if (dim < 1) throw new Error("dim must be >= 1");
  const records: EmbsRecord[] = [];
  let off = HEADER_BYTES;
  for (let r = 0; r < count; r++) {
    if (off + 6 > buf.length) throw new Error(`record ${r}: truncated header`);
    const truth = buf.readInt32LE(off);
    off += 4;
    const viewCount = buf.readUInt16LE(off);
    off += 2;
    const need = (1 + viewCount) * dim * 4;
    if (off + need > buf.length) throw new Error(`record ${r}: truncated embeddings`);
    const vecs: Float64Array[] = [];
    for (let v = 0; v < 1 + viewCount; v++) {
      const vec = new Float64Array(dim);
      for (let d = 0; d < dim; d++) {
        vec[d] = buf.readFloatLE(off);
        off += 4;
      }
      vecs.push(vec);
    }
    records.push({ truth, original: vecs[0], views: vecs.slice(1) });
  }
  if (off !== buf.length) throw new Error(`${buf.length - off} trailing bytes after records`);
  return { dim, numClasses, records };
}

/** Raw-rows path for a manifest path: last extension replaced by .f32. */
export function bankRawPath(manifestPath: string): string {
  const slash = Math.max(manifestPath.lastIndexOf("/"), manifestPath.lastIndexOf("\\"));
  const dot = manifestPath.lastIndexOf(".");
  const stem = dot > slash ? manifestPath.slice(0, dot) : manifestPath;
  return stem + ".f32";
}

export interface ClassBank {
  names: string[];
  rows: Float64Array[]; // unit-norm, one per class
}

/** Serialize a class bank: returns manifest JSON text and raw f32 bytes. */
export function encodeBank(bank: ClassBank): { manifest: string; raw: Buffer } {
  if (bank.names.length !== bank.rows.length) {
    throw new Error(`${bank.names.length} names vs ${bank.rows.length} rows`);
  }
  if (bank.rows.length < 2) throw new Error("bank needs at least 2 classes");
  const dim = bank.rows[0].length;
  for (const row of bank.rows) checkVector(row, dim, "bank row");
  const raw = Buffer.alloc(bank.rows.length * dim * 4);
  let off = 0;
  for (const row of bank.rows) {
    for (let d = 0; d < dim; d++) {
      raw.writeFloatLE(row[d], off);
      off += 4;
    }
  }
  const manifest = JSON.stringify({ names: bank.names, C: dim }, null, 2) + "\n";
  return { manifest, raw };
}
