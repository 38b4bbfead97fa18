/**
 * Dataset -> EMBS export pipeline.
 *
 * For every image in a dataset directory: decode the PPM, encode a canonical
 * center-crop view as the record's original embedding, then encode `views`
 * seeded random crops as the augmented views. Class-bank rows come from the
 * jitter-free prototype image of each class, pushed through the same encoder
 * so the whole export lives in one embedding space.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { parsePpm } from "./ppm.js";
import { canonicalView, randomView, viewRng } from "./augment.js";
import { encodeImage } from "./encoder.js";
import { loadManifest, prototypeImage } from "./dataset.js";
import { encodeEmbs, encodeBank, bankRawPath, EmbsRecord } from "./embs.js";

export interface ExportSpec {
  views: number; // augmented views per record
  dim: number; // embedding dimension
  seed: number; // drives view sampling
  viewSize: number; // square raster fed to the encoder
}

export interface ExportResult {
  records: number;
  labeled: number;
  classes: number;
  dim: number;
  views: number;
  streamBytes: number;
}

export function exportDataset(
  datasetDir: string,
  streamPath: string,
  bankPath: string,
  spec: ExportSpec,
): ExportResult {
  if (spec.views < 0) throw new Error(`views must be >= 0, got ${spec.views}`);
  if (spec.dim < 2) throw new Error(`dim must be >= 2, got ${spec.dim}`);
  if (spec.viewSize < 16) throw new Error(`view size must be >= 16, got ${spec.viewSize}`);
  const manifest = loadManifest(datasetDir);
  const records: EmbsRecord[] = [];
  let labeled = 0;
  for (let id = 0; id < manifest.images.length; id++) {
    const entry = manifest.images[id];
    const imgPath = path.join(datasetDir, entry.file);
    let img;
    try {
      img = parsePpm(fs.readFileSync(imgPath));
    } catch (err) {
      throw new Error(`${entry.file}: ${(err as Error).message}`);
    }
    const original = encodeImage(canonicalView(img, spec.viewSize), spec.dim);
    const views = [];
    for (let v = 0; v < spec.views; v++) {
      const rng = viewRng(spec.seed, id, v);
      views.push(encodeImage(randomView(img, spec.viewSize, rng), spec.dim));
    }
    if (entry.label >= 0) labeled++;
    records.push({ truth: entry.label, original, views });
  }
  if (records.length === 0) throw new Error("dataset holds no images");
  const bankRows = manifest.classes.map((_, c) =>
    encodeImage(prototypeImage(manifest.classes.length, c, spec.viewSize), spec.dim),
  );
  const stream = encodeEmbs({
    dim: spec.dim,
    numClasses: manifest.classes.length,
    records,
  });
  const bank = encodeBank({ names: manifest.classes, rows: bankRows });
  fs.mkdirSync(path.dirname(path.resolve(streamPath)), { recursive: true });
  fs.mkdirSync(path.dirname(path.resolve(bankPath)), { recursive: true });
  fs.writeFileSync(streamPath, stream);
  fs.writeFileSync(bankPath, bank.manifest);
  fs.writeFileSync(bankRawPath(bankPath), bank.raw);
  return {
    records: records.length,
    labeled,
    classes: manifest.classes.length,
    dim: spec.dim,
    views: spec.views,
    streamBytes: stream.length,
  };
}
